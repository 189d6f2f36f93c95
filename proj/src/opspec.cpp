#include "crepair/opspec.hpp"

#include <map>
#include <sstream>
#include <vector>

namespace crepair::opspec {
namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

struct KvList {
    std::map<std::string, std::string> kv;
    std::string token;  // owning token, for error messages

    double num(const std::string& key) const {
        auto it = kv.find(key);
        if (it == kv.end())
            throw parse_error("operator spec: missing '" + key + "' in token '" + token + "'");
        try {
            std::size_t pos = 0;
            double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            throw parse_error("operator spec: bad number '" + it->second + "' in token '" + token +
                              "'");
        }
    }
    double num_or(const std::string& key, double fallback) const {
        return kv.count(key) ? num(key) : fallback;
    }
    std::string str_or(const std::string& key, const std::string& fallback) const {
        auto it = kv.find(key);
        return it == kv.end() ? fallback : it->second;
    }
    void allow_only(std::initializer_list<const char*> keys) const {
        for (const auto& [k, v] : kv) {
            bool ok = false;
            for (const char* a : keys)
                if (k == a) ok = true;
            if (!ok)
                throw parse_error("operator spec: unknown key '" + k + "' in token '" + token +
                                  "'");
        }
    }
};

KvList parse_kv(const std::string& token, const std::string& args) {
    KvList out;
    out.token = token;
    if (args.empty()) return out;
    for (const std::string& part : split(args, ',')) {
        auto eq = part.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == part.size())
            throw parse_error("operator spec: expected key=value, got '" + part + "' in token '" +
                              token + "'");
        out.kv[part.substr(0, eq)] = part.substr(eq + 1);
    }
    return out;
}

cleanup::SolverSpec make_solver(const std::string& name, const KvList& kv) {
    using cleanup::SolverSpec;
    if (name == "jacobi") return SolverSpec::jacobi(static_cast<int>(kv.num_or("k", 20)));
    if (name == "sor")
        return SolverSpec::sor(static_cast<int>(kv.num_or("k", 20)), kv.num_or("omega", 1.5));
    if (name == "cg") return SolverSpec::cg(static_cast<int>(kv.num_or("k", 20)));
    if (name == "mg") return SolverSpec::mg(static_cast<int>(kv.num_or("cycles", 2)));
    if (name == "direct") return SolverSpec::direct();
    throw parse_error("operator spec: unknown solver '" + name + "' in token '" + kv.token + "'");
}

}  // namespace

compose::CleanupSpec parse(const std::string& text) {
    if (text.empty()) throw parse_error("operator spec: empty string");
    compose::CleanupSpec spec;
    spec.spec_string = text;

    std::string body = text;
    auto at = body.find('@');
    if (at != std::string::npos) {
        const std::string frame = body.substr(at + 1);
        if (frame == "physical")
            spec.frame = Frame::physical;
        else if (frame == "normalized")
            spec.frame = Frame::normalized;
        else
            throw parse_error("operator spec: unknown frame tag '@" + frame + "'");
        body = body.substr(0, at);
    }

    std::vector<std::string> tokens = split(body, '+');
    if (tokens.empty() || tokens[0].empty())
        throw parse_error("operator spec: missing base operator in '" + text + "'");

    // Base token.
    {
        const std::string& token = tokens[0];
        auto colon = token.find(':');
        const std::string name = token.substr(0, colon);
        KvList kv = parse_kv(token, colon == std::string::npos ? "" : token.substr(colon + 1));

        if (name == "raw" || name == "identity") {
            kv.allow_only({});
            spec.base = compose::BaseKind::raw;
            spec.mode = compose::Mode::raw;
        } else if (name == "fft") {
            kv.allow_only({});
            spec.base = compose::BaseKind::fft;
        } else if (name == "jacobi" || name == "sor" || name == "cg" || name == "mg" ||
                   name == "direct") {
            if (name == "sor")
                kv.allow_only({"k", "omega"});
            else if (name == "mg")
                kv.allow_only({"cycles"});
            else if (name == "direct")
                kv.allow_only({});
            else
                kv.allow_only({"k"});
            spec.base = compose::BaseKind::poisson;
            spec.solver = make_solver(name, kv);
        } else if (name == "screened") {
            kv.allow_only({"lambda", "k", "omega", "cycles", "solver"});
            spec.base = compose::BaseKind::poisson;
            spec.lambda = kv.num("lambda");
            spec.solver = make_solver(kv.str_or("solver", "jacobi"), kv);
        } else if (name == "geo") {
            kv.allow_only({"lb", "lc", "w", "k", "omega", "cycles", "solver"});
            spec.base = compose::BaseKind::poisson;
            spec.geo = true;
            spec.lambda_bdry = kv.num("lb");
            spec.lambda_core = kv.num("lc");
            spec.geo_taper_width = static_cast<int>(kv.num_or("w", 1));
            spec.solver = make_solver(kv.str_or("solver", "jacobi"), kv);
        } else {
            throw parse_error("operator spec: unknown base operator '" + name + "'");
        }
    }

    for (std::size_t t = 1; t < tokens.size(); ++t) {
        const std::string& token = tokens[t];
        auto colon = token.find(':');
        const std::string name = token.substr(0, colon);
        KvList kv = parse_kv(token, colon == std::string::npos ? "" : token.substr(colon + 1));
        if (name == "taper") {
            kv.allow_only({"w"});
            spec.taper = cleanup::TaperMask{static_cast<int>(kv.num_or("w", 1))};
        } else if (name == "blend") {
            kv.allow_only({"alpha"});
            spec.blend = compose::BlendSpec{kv.num("alpha")};
        } else if (name == "gate") {
            kv.allow_only({"tau", "q"});
            spec.gate = compose::GateSpec{kv.num("tau"), kv.num_or("q", 1.0)};
        } else {
            throw parse_error("operator spec: unknown suffix '+" + name + "'");
        }
    }

    spec.validate();
    return spec;
}

std::string grammar_help() {
    std::ostringstream os;
    os << "Operator spec grammar:\n"
       << "  base:      raw | fft | jacobi:k=20 | sor:k=20,omega=1.5 | cg:k=20 |\n"
       << "             mg:cycles=2 | direct | screened:lambda=8,k=20,solver=jacobi |\n"
       << "             geo:lb=32,lc=4,w=2,k=20,solver=jacobi\n"
       << "  suffixes:  +taper:w=2 | +blend:alpha=0.1 | +gate:tau=0.6,q=1.0\n"
       << "  frame tag: @physical | @normalized (default normalized)\n"
       << "Example: screened:lambda=8,k=20,solver=jacobi+taper:w=2@physical\n";
    return os.str();
}

}  // namespace crepair::opspec
