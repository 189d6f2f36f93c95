#include "crepair/cli.hpp"

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "crepair/diagnostics.hpp"
#include "crepair/field_io.hpp"
#include "crepair/hierarchy.hpp"
#include "crepair/opspec.hpp"
#include "crepair/protocol.hpp"
#include "crepair/rollout.hpp"
#include "crepair/synthetic.hpp"

namespace crepair::cli {
namespace {

using nlohmann::json;

constexpr const char* VERSION = "0.1.0";

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string fnv1a_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open input file: " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (is) {
        is.read(buf, sizeof buf);
        for (std::streamsize k = 0; k < is.gcount(); ++k) {
            h ^= static_cast<unsigned char>(buf[k]);
            h *= 0x100000001b3ULL;
        }
    }
    char out[24];
    std::snprintf(out, sizeof out, "fnv64:%016llx", static_cast<unsigned long long>(h));
    return out;
}

// Minimal thread pool over an index range; results must be written to
// pre-sized slots so the output is independent of the job count.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
    jobs = std::max(1, std::min(jobs, n));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int t = 0; t < jobs; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

struct ManifestBuilder {
    json m;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    ManifestBuilder(const std::string& command) {
        m["command"] = command;
        m["version"] = VERSION;
        m["config"] = json::object();
        m["seeds"] = json::array();
        m["inputs"] = json::object();
        m["outputs"] = json::array();
    }
    void config(const std::string& key, const json& value) { m["config"][key] = value; }
    void seed(std::uint64_t s) { m["seeds"].push_back(s); }
    void input(const std::string& path) { m["inputs"][path] = fnv1a_file(path); }
    void output(const std::string& path) { m["outputs"].push_back(path); }
    void write(const std::string& path) {
        m["wall_clock_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::ofstream os(path, std::ios::binary);
        if (!os) throw io_error("cannot write manifest: " + path);
        os << m.dump(2) << "\n";
    }
};

void write_text(const std::string& path, const std::string& body) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot write output file: " + path);
    os << body;
}

NormFrame norm_frame_from(const std::vector<VelocityField>& targets) {
    double su = 0.0, sv = 0.0, su2 = 0.0, sv2 = 0.0;
    std::size_t n = 0;
    for (const VelocityField& f : targets) {
        for (double x : f.u_grid().data()) {
            su += x;
            su2 += x * x;
        }
        for (double x : f.v_grid().data()) {
            sv += x;
            sv2 += x * x;
        }
        n += f.u_grid().data().size();
    }
    if (n == 0) throw config_error("norm frame: empty target set");
    NormFrame fr;
    fr.mean_u = su / static_cast<double>(n);
    fr.mean_v = sv / static_cast<double>(n);
    const double var_u = su2 / static_cast<double>(n) - fr.mean_u * fr.mean_u;
    const double var_v = sv2 / static_cast<double>(n) - fr.mean_v * fr.mean_v;
    fr.std_u = var_u > 0.0 ? std::sqrt(var_u) : 1.0;
    fr.std_v = var_v > 0.0 ? std::sqrt(var_v) : 1.0;
    return fr;
}

// ---- shared predictor flags ------------------------------------------------

struct PredictorFlags {
    std::string kind = "surrogate";  // surrogate | replay
    double nu = 1e-3;
    double dt = 1e-2;
    double forcing = 0.0;
    bool no_dealias = false;
    double sigma_c = 0.0;
    double sigma_s = 0.0;
    double bias = 0.0;
    std::uint64_t seed = 0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--predictor", kind, "Predictor kind: surrogate | replay")
            ->check(CLI::IsMember({"surrogate", "replay"}));
        cmd->add_option("--nu", nu, "Viscosity of the surrogate dynamics");
        cmd->add_option("--dt", dt, "Time step of the surrogate dynamics");
        cmd->add_option("--forcing", forcing, "Forcing amplitude of the surrogate dynamics");
        cmd->add_flag("--no-dealias", no_dealias, "Disable 2/3-rule dealiasing");
        cmd->add_option("--sigma-c", sigma_c, "Compressible noise amplitude");
        cmd->add_option("--sigma-s", sigma_s, "Solenoidal noise amplitude");
        cmd->add_option("--bias", bias, "Constant u-component drift");
        cmd->add_option("--pred-seed", seed, "Predictor noise seed")->required();
    }

    std::unique_ptr<synthetic::Predictor> build(
        const std::vector<VelocityField>& targets) const {
        if (kind == "replay") return synthetic::make_replay_surrogate(targets, sigma_c, seed);
        synthetic::SurrogateSpec spec;
        spec.dynamics.grid = targets.empty() ? 64 : targets[0].height();
        spec.dynamics.nu = nu;
        spec.dynamics.dt = dt;
        spec.dynamics.forcing = forcing;
        spec.dynamics.dealias = !no_dealias;
        spec.sigma_c = sigma_c;
        spec.sigma_s = sigma_s;
        spec.bias = bias;
        spec.seed = seed;
        return synthetic::make_surrogate(spec);
    }

    void record(ManifestBuilder& mb) const {
        mb.config("predictor", kind);
        mb.config("nu", nu);
        mb.config("dt", dt);
        mb.config("forcing", forcing);
        mb.config("dealias", !no_dealias);
        mb.config("sigma_c", sigma_c);
        mb.config("sigma_s", sigma_s);
        mb.config("bias", bias);
        mb.config("pred_seed", seed);
        mb.seed(seed);
    }
};

rollout::Mode parse_mode(const std::string& mode) {
    if (mode == "raw") return rollout::Mode::raw;
    if (mode == "posthoc") return rollout::Mode::posthoc;
    if (mode == "inloop") return rollout::Mode::inloop;
    if (mode == "cap") return rollout::Mode::cap;
    throw parse_error("unknown rollout mode '" + mode + "'");
}

std::vector<double> parse_doubles(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) throw parse_error("empty entry in numeric list '" + text + "'");
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &pos);
        } catch (const std::exception&) {
            pos = std::string::npos;
        }
        if (pos != tok.size()) throw parse_error("bad number '" + tok + "' in list");
        out.push_back(v);
    }
    if (out.empty()) throw parse_error("empty numeric list");
    return out;
}

std::vector<std::string> split_list(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, sep))
        if (!tok.empty()) out.push_back(tok);
    return out;
}

// ---- subcommand payload structs -------------------------------------------

struct GeneratePeriodicArgs {
    int grid = 64;
    int steps = 0;
    std::uint64_t seed = 0;
    double nu = 1e-3;
    double dt = 1e-2;
    double forcing = 0.0;
    bool no_dealias = false;
    std::string init = "random";
    double amplitude = 1.0;
    std::string out;
};

int cmd_generate_periodic(const GeneratePeriodicArgs& a) {
    synthetic::NSConfig cfg;
    cfg.grid = a.grid;
    cfg.nu = a.nu;
    cfg.dt = a.dt;
    cfg.forcing = a.forcing;
    cfg.dealias = !a.no_dealias;
    cfg.init_amplitude = a.amplitude;
    cfg.seed = a.seed;
    cfg.init = a.init == "taylor_green" ? synthetic::InitKind::taylor_green
                                        : synthetic::InitKind::random_bandlimited;

    ManifestBuilder mb("generate periodic");
    mb.config("grid", a.grid);
    mb.config("steps", a.steps);
    mb.config("nu", a.nu);
    mb.config("dt", a.dt);
    mb.config("forcing", a.forcing);
    mb.config("dealias", cfg.dealias);
    mb.config("init", a.init);
    mb.config("amplitude", a.amplitude);
    mb.config("seed", a.seed);
    mb.seed(a.seed);

    std::vector<VelocityField> frames = synthetic::generate_periodic_trajectory(cfg, a.steps);
    write_vt01_file(a.out, frames);
    mb.output(a.out);
    mb.write(a.out + ".manifest.json");
    return 0;
}

struct GenerateBoundedArgs {
    std::string kind;
    int height = 64;
    int width = 64;
    int count = 0;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_generate_bounded(const GenerateBoundedArgs& a) {
    const synthetic::BoundedKind kind = a.kind == "cavity_like"
                                            ? synthetic::BoundedKind::cavity_like
                                            : synthetic::BoundedKind::channel_like;
    ManifestBuilder mb("generate bounded");
    mb.config("kind", a.kind);
    mb.config("height", a.height);
    mb.config("width", a.width);
    mb.config("count", a.count);
    mb.config("seed", a.seed);
    mb.seed(a.seed);

    std::vector<VelocityField> fields =
        synthetic::generate_bounded_targets(kind, a.height, a.width, a.count, a.seed);
    write_vt01_file(a.out, fields);
    mb.output(a.out);
    mb.write(a.out + ".manifest.json");
    return 0;
}

struct GenerateHierarchyArgs {
    int levels = 0;
    int fanout = 0;
    int steps = 0;
    std::uint64_t seed = 0;
    std::string out;  // prefix
};

int cmd_generate_hierarchy(const GenerateHierarchyArgs& a) {
    ManifestBuilder mb("generate hierarchy");
    mb.config("levels", a.levels);
    mb.config("fanout", a.fanout);
    mb.config("T", a.steps);
    mb.config("seed", a.seed);
    mb.seed(a.seed);

    synthetic::HierarchySeries hs =
        synthetic::generate_hierarchy_series(a.levels, a.fanout, a.steps, a.seed);

    json hj;
    hj["labels"] = hs.tree.labels();
    hj["S"] = hs.tree.s_row_major();
    hj["root"] = hs.tree.root();
    hj["bottom"] = hs.tree.bottom_indices();
    const std::string hier_path = a.out + ".hierarchy.json";
    write_text(hier_path, hj.dump(2) + "\n");
    mb.output(hier_path);

    std::ostringstream csv;
    for (std::size_t c = 0; c < hs.tree.labels().size(); ++c)
        csv << (c ? "," : "") << hs.tree.labels()[c];
    csv << "\n";
    for (const auto& slice : hs.slices) {
        for (std::size_t c = 0; c < slice.size(); ++c) csv << (c ? "," : "") << fmt(slice[c]);
        csv << "\n";
    }
    const std::string series_path = a.out + ".series.csv";
    write_text(series_path, csv.str());
    mb.output(series_path);
    mb.write(a.out + ".manifest.json");
    return 0;
}

struct AuditArgs {
    std::vector<std::string> ops;
    std::string targets;
    int strip_width = 0;  // 0 = skip strip audit
    int jobs = 1;
    std::string out;  // prefix
};

int cmd_audit(const AuditArgs& a) {
    ManifestBuilder mb("audit");
    mb.config("ops", a.ops);
    mb.config("targets", a.targets);
    mb.config("strip_width", a.strip_width);
    mb.config("jobs", a.jobs);
    mb.input(a.targets);

    std::vector<VelocityField> targets = read_vt01_file(a.targets);
    const NormFrame frame = norm_frame_from(targets);

    std::vector<compose::CleanupSpec> specs;
    for (const std::string& s : a.ops) specs.push_back(opspec::parse(s));

    std::vector<diagnostics::OperatorAudit> audits(specs.size());
    std::vector<diagnostics::StripAudit> strips(specs.size());
    parallel_for(static_cast<int>(specs.size()), a.jobs, [&](int i) {
        audits[i] = diagnostics::audit_operator(specs[i], targets, frame);
        if (a.strip_width > 0)
            strips[i] = diagnostics::strip_audit(specs[i], targets, a.strip_width, frame);
    });

    std::ostringstream csv;
    csv << "operator,samples,gt_div_before_mean,gt_div_before_std,gt_div_after_mean,"
           "gt_div_after_std,gt_distortion_mse_mean,gt_distortion_mse_std,"
           "relative_system_residual_mean,relative_system_residual_std,"
           "distortion_energy_pct_mean,distortion_energy_pct_std\n";
    for (std::size_t i = 0; i < audits.size(); ++i) {
        const auto& au = audits[i];
        csv << csv_quote(a.ops[i]) << "," << au.samples << "," << fmt(au.div_before.mean) << ","
            << fmt(au.div_before.stddev) << "," << fmt(au.div_after.mean) << ","
            << fmt(au.div_after.stddev) << "," << fmt(au.distortion_mse.mean) << ","
            << fmt(au.distortion_mse.stddev) << ",";
        if (au.relative_residual)
            csv << fmt(au.relative_residual->mean) << "," << fmt(au.relative_residual->stddev);
        else
            csv << ",";
        csv << "," << fmt(au.distortion_energy_pct.mean) << ","
            << fmt(au.distortion_energy_pct.stddev) << "\n";
    }
    const std::string audit_path = a.out + ".audit.csv";
    write_text(audit_path, csv.str());
    mb.output(audit_path);

    if (a.strip_width > 0) {
        std::ostringstream sc;
        sc << "operator,strip_width,strip_div_rms,core_div_rms,strip_to_core_ratio,"
              "strip_distortion_mse\n";
        for (std::size_t i = 0; i < strips.size(); ++i) {
            const auto& st = strips[i];
            sc << csv_quote(a.ops[i]) << "," << st.strip_width << "," << fmt(st.strip_div_rms) << ","
               << fmt(st.core_div_rms) << "," << fmt(st.strip_to_core_ratio) << ","
               << fmt(st.strip_distortion_mse) << "\n";
        }
        const std::string strip_path = a.out + ".strip.csv";
        write_text(strip_path, sc.str());
        mb.output(strip_path);
    }
    mb.write(a.out + ".manifest.json");
    return 0;
}

struct RolloutArgs {
    std::string mode;
    std::string op;
    std::string targets;
    int horizon = 0;
    double theta_blow = 1e6;
    double theta_stable = 0.0;  // 0 = auto
    PredictorFlags pred;
    std::string out;  // prefix
};

int cmd_rollout(const RolloutArgs& a) {
    ManifestBuilder mb("rollout");
    mb.config("mode", a.mode);
    mb.config("op", a.op);
    mb.config("targets", a.targets);
    mb.config("horizon", a.horizon);
    mb.config("theta_blow", a.theta_blow);
    mb.config("theta_stable", a.theta_stable);
    a.pred.record(mb);
    mb.input(a.targets);

    std::vector<VelocityField> targets = read_vt01_file(a.targets);
    auto predictor = a.pred.build(targets);

    rollout::RolloutConfig cfg;
    cfg.horizon = a.horizon;
    cfg.mode = parse_mode(a.mode);
    cfg.op = opspec::parse(a.op);
    cfg.theta_blow = a.theta_blow;
    if (a.theta_stable > 0.0) cfg.theta_stable = a.theta_stable;
    cfg.frame = norm_frame_from(targets);

    rollout::RolloutTrace trace = rollout::run_rollout(*predictor, targets, cfg);

    std::ostringstream csv;
    csv << "step,mse,div_rms\n";
    for (const auto& r : trace.steps)
        csv << r.step << "," << fmt(r.mse) << "," << fmt(r.div_rms) << "\n";
    const std::string steps_path = a.out + ".steps.csv";
    write_text(steps_path, csv.str());
    mb.output(steps_path);

    json summary;
    summary["mode"] = a.mode;
    summary["operator_spec"] = a.op;
    summary["mse_auc"] = trace.summary.mse_auc;
    summary["mse_at_T"] = trace.summary.mse_at_T;
    summary["div_at_T"] = trace.summary.div_at_T;
    summary["stable_len"] = trace.summary.stable_len;
    summary["blowup"] = trace.summary.blowup;
    summary["theta_stable_used"] = trace.summary.theta_stable_used;
    summary["theta_blow_used"] = trace.summary.theta_blow_used;
    const std::string summary_path = a.out + ".summary.json";
    write_text(summary_path, summary.dump(2) + "\n");
    mb.output(summary_path);
    mb.write(a.out + ".manifest.json");
    return 0;
}

struct SweepScreenedArgs {
    std::string lambdas;
    std::string solver = "jacobi";
    int k = 20;
    double omega = 1.5;
    int cycles = 2;
    std::string targets;
    int horizon = 0;
    int jobs = 1;
    PredictorFlags pred;
    std::string out;
};

cleanup::SolverSpec make_solver_spec(const std::string& name, int k, double omega, int cycles) {
    if (name == "jacobi") return cleanup::SolverSpec::jacobi(k);
    if (name == "sor") return cleanup::SolverSpec::sor(k, omega);
    if (name == "cg") return cleanup::SolverSpec::cg(k);
    if (name == "mg") return cleanup::SolverSpec::mg(cycles);
    if (name == "direct") return cleanup::SolverSpec::direct();
    throw parse_error("unknown solver '" + name + "'");
}

int cmd_sweep_screened(const SweepScreenedArgs& a) {
    ManifestBuilder mb("sweep screened");
    mb.config("lambdas", a.lambdas);
    mb.config("solver", a.solver);
    mb.config("k", a.k);
    mb.config("omega", a.omega);
    mb.config("cycles", a.cycles);
    mb.config("targets", a.targets);
    mb.config("horizon", a.horizon);
    mb.config("jobs", a.jobs);
    a.pred.record(mb);
    mb.input(a.targets);

    std::vector<VelocityField> targets = read_vt01_file(a.targets);
    const std::vector<double> lambdas = parse_doubles(a.lambdas);
    const cleanup::SolverSpec solver = make_solver_spec(a.solver, a.k, a.omega, a.cycles);

    std::vector<protocol::ScreenedSweepRow> rows(lambdas.size());
    parallel_for(static_cast<int>(lambdas.size()), a.jobs, [&](int i) {
        auto predictor = a.pred.build(targets);
        rows[i] = protocol::sweep_screened(*predictor, targets, {lambdas[i]}, solver,
                                           a.horizon)[0];
    });

    std::ostringstream csv;
    csv << "lambda,mse_at_T,mse_auc,div_at_T,distortion\n";
    for (const auto& r : rows)
        csv << fmt(r.lambda) << "," << fmt(r.mse_at_T) << "," << fmt(r.mse_auc) << ","
            << fmt(r.div_at_T) << "," << fmt(r.distortion) << "\n";
    const std::string csv_path = a.out + ".csv";
    write_text(csv_path, csv.str());
    mb.output(csv_path);
    mb.write(a.out + ".manifest.json");
    return 0;
}

struct SweepMismatchArgs {
    std::string op;
    std::string alphas;
    std::string targets;
    int horizon = 0;
    int jobs = 1;
    PredictorFlags pred;
    std::string out;
};

int cmd_sweep_mismatch(const SweepMismatchArgs& a) {
    ManifestBuilder mb("sweep mismatch");
    mb.config("op", a.op);
    mb.config("alphas", a.alphas);
    mb.config("targets", a.targets);
    mb.config("horizon", a.horizon);
    mb.config("jobs", a.jobs);
    a.pred.record(mb);
    mb.input(a.targets);

    std::vector<VelocityField> targets = read_vt01_file(a.targets);
    const std::vector<double> alphas = parse_doubles(a.alphas);
    const compose::CleanupSpec op = opspec::parse(a.op);

    std::vector<protocol::MismatchRow> rows(alphas.size());
    parallel_for(static_cast<int>(alphas.size()), a.jobs, [&](int i) {
        auto predictor = a.pred.build(targets);
        rows[i] =
            protocol::sweep_mismatch(*predictor, targets, op, {alphas[i]}, a.horizon).rows[0];
    });
    int best = 0;
    for (int i = 1; i < static_cast<int>(rows.size()); ++i)
        if (rows[i].mse_at_T < rows[best].mse_at_T) best = i;

    std::ostringstream csv;
    csv << "alpha,mse_at_T,div_at_T\n";
    for (const auto& r : rows)
        csv << fmt(r.alpha) << "," << fmt(r.mse_at_T) << "," << fmt(r.div_at_T) << "\n";
    const std::string csv_path = a.out + ".csv";
    write_text(csv_path, csv.str());
    mb.output(csv_path);

    json summary;
    summary["best_alpha"] = rows[best].alpha;
    const std::string summary_path = a.out + ".summary.json";
    write_text(summary_path, summary.dump(2) + "\n");
    mb.output(summary_path);
    mb.write(a.out + ".manifest.json");
    return 0;
}

struct SelectArgs {
    std::string menu;  // semicolon-separated operator specs
    std::string candidate_mode = "inloop";
    std::string val;   // comma-separated VT01 paths
    std::string test;
    int horizon = 0;
    PredictorFlags pred;
    std::string out;
};

int cmd_select(const SelectArgs& a) {
    ManifestBuilder mb("select");
    mb.config("menu", a.menu);
    mb.config("candidate_mode", a.candidate_mode);
    mb.config("val", a.val);
    mb.config("test", a.test);
    mb.config("horizon", a.horizon);
    a.pred.record(mb);

    auto load_set = [&](const std::string& list) {
        std::vector<std::vector<VelocityField>> out;
        for (const std::string& path : split_list(list, ',')) {
            mb.input(path);
            out.push_back(read_vt01_file(path));
        }
        return out;
    };
    const auto val_sets = load_set(a.val);
    const auto test_sets = load_set(a.test);
    if (val_sets.empty() || test_sets.empty())
        throw config_error("select: need at least one validation and one test trajectory");

    protocol::CandidateMenu menu;
    for (const std::string& s : split_list(a.menu, ';')) {
        compose::CleanupSpec spec = opspec::parse(s);
        if (spec.mode != compose::Mode::raw)
            spec.mode = a.candidate_mode == "posthoc" ? compose::Mode::posthoc
                                                      : compose::Mode::inloop;
        menu.candidates.push_back(std::move(spec));
    }

    auto predictor = a.pred.build(val_sets[0]);
    protocol::SelectionReport report =
        protocol::select_operator(menu, *predictor, val_sets, test_sets, a.horizon);

    json rj;
    rj["selected_index"] = report.selected_index;
    rj["selected_spec"] = report.selected_spec;
    rj["validation"] = json::array();
    for (const auto& row : report.validation)
        rj["validation"].push_back({{"spec", row.spec},
                                    {"val_mse_at_T", row.val_mse_at_T},
                                    {"val_div_at_T", row.val_div_at_T}});
    rj["test"] = json::array();
    for (const auto& row : report.test)
        rj["test"].push_back({{"label", row.label},
                              {"spec", row.spec},
                              {"test_mse_at_T", row.test_mse_at_T},
                              {"test_div_at_T", row.test_div_at_T}});
    const std::string report_path = a.out + ".report.json";
    write_text(report_path, rj.dump(2) + "\n");
    mb.output(report_path);

    std::ostringstream csv;
    csv << "label,spec,test_mse_at_T,test_div_at_T\n";
    for (const auto& row : report.test)
        csv << row.label << "," << csv_quote(row.spec) << "," << fmt(row.test_mse_at_T) << ","
            << fmt(row.test_div_at_T) << "\n";
    const std::string csv_path = a.out + ".csv";
    write_text(csv_path, csv.str());
    mb.output(csv_path);
    mb.write(a.out + ".manifest.json");
    return 0;
}

struct HierArgs {
    int levels = 0;
    int fanout = 0;
    int steps = 0;
    std::uint64_t seed = 0;
    double noise = 0.1;
    double alpha = 1.0;
    std::string out;
};

int cmd_hier(const HierArgs& a) {
    ManifestBuilder mb("hier");
    mb.config("levels", a.levels);
    mb.config("fanout", a.fanout);
    mb.config("T", a.steps);
    mb.config("seed", a.seed);
    mb.config("noise", a.noise);
    mb.config("alpha", a.alpha);
    mb.seed(a.seed);
    if (a.noise < 0.0) throw config_error("hier: noise must be non-negative");

    synthetic::HierarchySeries hs =
        synthetic::generate_hierarchy_series(a.levels, a.fanout, a.steps, a.seed);
    const hierarchy::Hierarchy& tree = hs.tree;

    std::mt19937_64 rng(a.seed ^ 0x68696572ULL);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::vector<double>> noisy = hs.slices;
    for (auto& slice : noisy)
        for (double& x : slice) x += a.noise * normal(rng);

    hierarchy::Proportions props = hierarchy::proportions_from_history(tree, hs.slices);

    struct Method {
        std::string name;
        std::function<std::vector<double>(const std::vector<double>&)> op;
    };
    std::vector<Method> methods;
    methods.push_back({"ols", [&](const auto& x) { return hierarchy::reconcile_ols(tree, x); }});
    methods.push_back(
        {"bottom_up", [&](const auto& x) { return hierarchy::reconcile_bottom_up(tree, x); }});
    methods.push_back({"top_down", [&](const auto& x) {
                           return hierarchy::reconcile_top_down(tree, props, x, a.alpha);
                       }});

    std::ostringstream csv;
    csv << "method,coherence_before,coherence_after,target_distortion\n";
    for (const auto& method : methods) {
        double before = 0.0, after = 0.0;
        for (const auto& slice : noisy) {
            before += hierarchy::coherence_rms(tree, slice);
            after += hierarchy::coherence_rms(tree, method.op(slice));
        }
        before /= static_cast<double>(noisy.size());
        after /= static_cast<double>(noisy.size());
        const double distortion = hierarchy::hier_distortion(tree, method.op, hs.slices);
        csv << method.name << "," << fmt(before) << "," << fmt(after) << ","
            << fmt(distortion) << "\n";
    }
    const std::string csv_path = a.out + ".csv";
    write_text(csv_path, csv.str());
    mb.output(csv_path);
    mb.write(a.out + ".manifest.json");
    return 0;
}

int dispatch(int argc, const char* const* argv) {
    CLI::App app{"Constraint-repair experiment toolkit for autoregressive field forecasting"};
    app.require_subcommand(1);
    app.footer(opspec::grammar_help());

    // generate
    auto* gen = app.add_subcommand("generate", "Produce synthetic benchmark data");
    gen->require_subcommand(1);

    GeneratePeriodicArgs gp;
    auto* gen_p = gen->add_subcommand("periodic", "Periodic incompressible trajectory");
    gen_p->add_option("--grid", gp.grid, "Grid size N (N x N)");
    gen_p->add_option("--steps", gp.steps, "Number of time steps")->required();
    gen_p->add_option("--seed", gp.seed, "Generator seed")->required();
    gen_p->add_option("--nu", gp.nu, "Viscosity");
    gen_p->add_option("--dt", gp.dt, "Time step");
    gen_p->add_option("--forcing", gp.forcing, "Forcing amplitude");
    gen_p->add_flag("--no-dealias", gp.no_dealias, "Disable 2/3-rule dealiasing");
    gen_p->add_option("--amplitude", gp.amplitude, "RMS of the random initial field");
    gen_p->add_option("--init", gp.init, "Initial condition: random | taylor_green")
        ->check(CLI::IsMember({"random", "taylor_green"}));
    gen_p->add_option("--out", gp.out, "Output VT01 path")->required();

    GenerateBoundedArgs gb;
    auto* gen_b = gen->add_subcommand("bounded", "Analytic bounded-domain target set");
    gen_b->add_option("--kind", gb.kind, "cavity_like | channel_like")
        ->required()
        ->check(CLI::IsMember({"cavity_like", "channel_like"}));
    gen_b->add_option("--height", gb.height, "Grid height");
    gen_b->add_option("--width", gb.width, "Grid width");
    gen_b->add_option("--count", gb.count, "Number of fields")->required();
    gen_b->add_option("--seed", gb.seed, "Generator seed")->required();
    gen_b->add_option("--out", gb.out, "Output VT01 path")->required();

    GenerateHierarchyArgs gh;
    auto* gen_h = gen->add_subcommand("hierarchy", "Coherent hierarchical series");
    gen_h->add_option("--levels", gh.levels, "Tree depth including the root")->required();
    gen_h->add_option("--fanout", gh.fanout, "Children per node")->required();
    gen_h->add_option("--T", gh.steps, "Series length")->required();
    gen_h->add_option("--seed", gh.seed, "Generator seed")->required();
    gen_h->add_option("--out", gh.out, "Output path prefix")->required();

    // audit
    AuditArgs au;
    auto* audit = app.add_subcommand("audit", "Operator audit over a target file");
    audit->add_option("--op", au.ops, "Operator spec (repeatable)")->required();
    audit->add_option("--targets", au.targets, "VT01 target file")->required();
    audit->add_option("--strip-width", au.strip_width, "Also emit a boundary-strip audit");
    audit->add_option("--jobs", au.jobs, "Parallel operator evaluations");
    audit->add_option("--out", au.out, "Output path prefix")->required();

    // rollout
    RolloutArgs ro;
    auto* roll = app.add_subcommand("rollout", "Autoregressive rollout");
    roll->add_option("--mode", ro.mode, "raw | posthoc | inloop | cap")
        ->required()
        ->check(CLI::IsMember({"raw", "posthoc", "inloop", "cap"}));
    roll->add_option("--op", ro.op, "Operator spec")->required();
    roll->add_option("--targets", ro.targets, "VT01 target trajectory")->required();
    roll->add_option("--horizon", ro.horizon, "Evaluation horizon")->required();
    roll->add_option("--theta-blow", ro.theta_blow, "Blow-up threshold");
    roll->add_option("--theta-stable", ro.theta_stable,
                     "Stability threshold (default: 10x raw step-1 MSE)");
    ro.pred.attach(roll);
    roll->add_option("--out", ro.out, "Output path prefix")->required();

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Hyperparameter sweeps");
    sweep->require_subcommand(1);

    SweepScreenedArgs ss;
    auto* sweep_s = sweep->add_subcommand("screened", "Screening-shift sweep");
    sweep_s->add_option("--lambdas", ss.lambdas, "Comma-separated lambda grid")->required();
    sweep_s->add_option("--solver", ss.solver, "jacobi | sor | cg | mg | direct")
        ->check(CLI::IsMember({"jacobi", "sor", "cg", "mg", "direct"}));
    sweep_s->add_option("--k", ss.k, "Iteration budget");
    sweep_s->add_option("--omega", ss.omega, "SOR relaxation factor");
    sweep_s->add_option("--cycles", ss.cycles, "Multigrid V-cycles");
    sweep_s->add_option("--targets", ss.targets, "VT01 target trajectory")->required();
    sweep_s->add_option("--horizon", ss.horizon, "Evaluation horizon")->required();
    sweep_s->add_option("--jobs", ss.jobs, "Parallel sweep cells");
    ss.pred.attach(sweep_s);
    sweep_s->add_option("--out", ss.out, "Output path prefix")->required();

    SweepMismatchArgs sm;
    auto* sweep_m = sweep->add_subcommand("mismatch", "Blend-strength sweep");
    sweep_m->add_option("--op", sm.op, "Operator spec")->required();
    sweep_m->add_option("--alphas", sm.alphas, "Comma-separated alpha grid")->required();
    sweep_m->add_option("--targets", sm.targets, "VT01 target trajectory")->required();
    sweep_m->add_option("--horizon", sm.horizon, "Evaluation horizon")->required();
    sweep_m->add_option("--jobs", sm.jobs, "Parallel sweep cells");
    sm.pred.attach(sweep_m);
    sweep_m->add_option("--out", sm.out, "Output path prefix")->required();

    // select
    SelectArgs se;
    auto* sel = app.add_subcommand("select", "Validation-to-deployment operator selection");
    sel->add_option("--menu", se.menu, "Semicolon-separated operator specs")->required();
    sel->add_option("--candidate-mode", se.candidate_mode,
                    "Rollout mode for non-raw candidates: inloop | posthoc")
        ->check(CLI::IsMember({"inloop", "posthoc"}));
    sel->add_option("--val", se.val, "Comma-separated validation VT01 files")->required();
    sel->add_option("--test", se.test, "Comma-separated test VT01 files")->required();
    sel->add_option("--horizon", se.horizon, "Evaluation horizon")->required();
    se.pred.attach(sel);
    sel->add_option("--out", se.out, "Output path prefix")->required();

    // hier
    HierArgs hi;
    auto* hier = app.add_subcommand("hier", "Hierarchical reconciliation experiment");
    hier->add_option("--levels", hi.levels, "Tree depth including the root")->required();
    hier->add_option("--fanout", hi.fanout, "Children per node")->required();
    hier->add_option("--T", hi.steps, "Series length")->required();
    hier->add_option("--seed", hi.seed, "Generator/noise seed")->required();
    hier->add_option("--noise", hi.noise, "Incoherent noise amplitude");
    hier->add_option("--alpha", hi.alpha, "Top-down blend strength");
    hier->add_option("--out", hi.out, "Output path prefix")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (gen_p->parsed()) return cmd_generate_periodic(gp);
    if (gen_b->parsed()) return cmd_generate_bounded(gb);
    if (gen_h->parsed()) return cmd_generate_hierarchy(gh);
    if (audit->parsed()) return cmd_audit(au);
    if (roll->parsed()) return cmd_rollout(ro);
    if (sweep_s->parsed()) return cmd_sweep_screened(ss);
    if (sweep_m->parsed()) return cmd_sweep_mismatch(sm);
    if (sel->parsed()) return cmd_select(se);
    if (hier->parsed()) return cmd_hier(hi);
    return 2;
}

}  // namespace

int run(int argc, const char* const* argv) {
    try {
        return dispatch(argc, argv);
    } catch (const numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace crepair::cli
