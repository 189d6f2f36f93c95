#include "crepair/protocol.hpp"

#include <algorithm>
#include <cmath>

namespace crepair::protocol {
namespace {

rollout::Mode rollout_mode(const compose::CleanupSpec& spec) {
    switch (spec.mode) {
        case compose::Mode::raw: return rollout::Mode::raw;
        case compose::Mode::posthoc: return rollout::Mode::posthoc;
        case compose::Mode::inloop: return rollout::Mode::inloop;
    }
    throw config_error("rollout_mode: unknown mode");
}

bool is_raw(const compose::CleanupSpec& s) { return s.mode == compose::Mode::raw; }

bool is_direct_anchor(const compose::CleanupSpec& s) {
    return !is_raw(s) && s.base == compose::BaseKind::poisson &&
           s.solver.kind == cleanup::SolverKind::direct;
}

// Mean MSE@T / Div@T of one operator over a set of trajectories.
std::pair<double, double> eval_candidate(const compose::CleanupSpec& spec,
                                         synthetic::Predictor& predictor,
                                         const std::vector<std::vector<VelocityField>>& sets,
                                         int t_eval) {
    double mse_sum = 0.0, div_sum = 0.0;
    for (const auto& targets : sets) {
        rollout::RolloutConfig cfg;
        cfg.horizon = t_eval;
        cfg.mode = rollout_mode(spec);
        cfg.op = spec;
        rollout::RolloutTrace trace = rollout::run_rollout(predictor, targets, cfg);
        mse_sum += trace.summary.mse_at_T;
        div_sum += trace.summary.div_at_T;
    }
    const double n = static_cast<double>(sets.size());
    return {mse_sum / n, div_sum / n};
}

}  // namespace

void CandidateMenu::validate() const {
    if (candidates.empty()) throw config_error("CandidateMenu: empty menu");
    int raw_count = 0;
    bool anchor = false;
    for (const auto& c : candidates) {
        c.validate();
        if (is_raw(c)) ++raw_count;
        if (is_direct_anchor(c)) anchor = true;
    }
    if (raw_count != 1)
        throw config_error("CandidateMenu: the raw baseline must appear exactly once");
    if (!anchor) throw config_error("CandidateMenu: a direct-solver anchor is required");
}

int simplicity_rank(const compose::CleanupSpec& spec) {
    if (is_raw(spec)) return 0;
    if (spec.base == compose::BaseKind::poisson &&
        spec.solver.kind == cleanup::SolverKind::direct)
        return 5;
    if (spec.geo) return 4;
    if (spec.gate || spec.blend) return 3;
    if (spec.base == compose::BaseKind::poisson) return 2;
    return 1;  // fft
}

SelectionReport select_operator(const CandidateMenu& menu, synthetic::Predictor& predictor,
                                const std::vector<std::vector<VelocityField>>& val_targets,
                                const std::vector<std::vector<VelocityField>>& test_targets,
                                int t_eval) {
    menu.validate();
    if (val_targets.empty() || test_targets.empty())
        throw config_error("select_operator: validation and test sets must be nonempty");
    if (t_eval < 1) throw config_error("select_operator: t_eval must be at least 1");

    SelectionReport report;
    report.validation.reserve(menu.candidates.size());
    for (const auto& spec : menu.candidates) {
        auto [m, d] = eval_candidate(spec, predictor, val_targets, t_eval);
        report.validation.push_back({spec.spec_string, m, d});
    }

    int best = 0;
    for (int i = 1; i < static_cast<int>(menu.candidates.size()); ++i) {
        const double mi = report.validation[i].val_mse_at_T;
        const double mb = report.validation[best].val_mse_at_T;
        if (mi < mb) {
            best = i;
            continue;
        }
        if (mi > mb) continue;
        const int ri = simplicity_rank(menu.candidates[i]);
        const int rb = simplicity_rank(menu.candidates[best]);
        if (ri < rb ||
            (ri == rb && menu.candidates[i].spec_string < menu.candidates[best].spec_string))
            best = i;
    }
    report.selected_index = best;
    report.selected_spec = report.validation[best].spec;

    auto add_test_row = [&](const std::string& label, int idx) {
        auto [m, d] = eval_candidate(menu.candidates[idx], predictor, test_targets, t_eval);
        report.test.push_back({label, menu.candidates[idx].spec_string, m, d});
    };
    add_test_row("selected", best);
    for (int i = 0; i < static_cast<int>(menu.candidates.size()); ++i)
        if (is_raw(menu.candidates[i])) {
            add_test_row("raw", i);
            break;
        }
    for (int i = 0; i < static_cast<int>(menu.candidates.size()); ++i)
        if (is_direct_anchor(menu.candidates[i])) {
            add_test_row("direct", i);
            break;
        }
    return report;
}

std::vector<ScreenedSweepRow> sweep_screened(synthetic::Predictor& predictor,
                                             const std::vector<VelocityField>& targets,
                                             const std::vector<double>& lambdas,
                                             const cleanup::SolverSpec& solver, int t_eval) {
    if (lambdas.empty()) throw config_error("sweep_screened: empty lambda grid");
    for (double l : lambdas)
        if (l < 0.0) throw config_error("sweep_screened: lambda must be non-negative");

    std::vector<ScreenedSweepRow> rows;
    rows.reserve(lambdas.size());
    for (double l : lambdas) {
        compose::CleanupSpec spec;
        spec.mode = compose::Mode::inloop;
        spec.base = compose::BaseKind::poisson;
        spec.lambda = l;
        spec.solver = solver;
        spec.spec_string = "screened:lambda=" + std::to_string(l);

        rollout::RolloutConfig cfg;
        cfg.horizon = t_eval;
        cfg.mode = rollout::Mode::inloop;
        cfg.op = spec;
        rollout::RolloutTrace trace = rollout::run_rollout(predictor, targets, cfg);

        double dist = 0.0;
        for (const VelocityField& y : targets)
            dist += mse(compose::framed_apply(y, spec, NormFrame::identity()), y);

        ScreenedSweepRow row;
        row.lambda = l;
        row.mse_at_T = trace.summary.mse_at_T;
        row.mse_auc = trace.summary.mse_auc;
        row.div_at_T = trace.summary.div_at_T;
        row.distortion = dist / static_cast<double>(targets.size());
        rows.push_back(row);
    }
    return rows;
}

MismatchSweep sweep_mismatch(synthetic::Predictor& predictor,
                             const std::vector<VelocityField>& targets,
                             const compose::CleanupSpec& op, const std::vector<double>& alphas,
                             int t_eval) {
    if (alphas.empty()) throw config_error("sweep_mismatch: empty alpha grid");
    for (double a : alphas)
        if (!(a >= 0.0 && a <= 1.0))
            throw config_error("sweep_mismatch: alpha values must lie in [0, 1]");

    MismatchSweep sweep;
    sweep.rows.reserve(alphas.size());
    int best = 0;
    for (int k = 0; k < static_cast<int>(alphas.size()); ++k) {
        compose::CleanupSpec blended = op;
        blended.mode = compose::Mode::inloop;
        blended.gate.reset();
        blended.blend = compose::BlendSpec{alphas[k]};

        rollout::RolloutConfig cfg;
        cfg.horizon = t_eval;
        cfg.mode = rollout::Mode::inloop;
        cfg.op = blended;
        rollout::RolloutTrace trace = rollout::run_rollout(predictor, targets, cfg);

        sweep.rows.push_back({alphas[k], trace.summary.mse_at_T, trace.summary.div_at_T});
        if (sweep.rows[k].mse_at_T < sweep.rows[best].mse_at_T) best = k;
    }
    sweep.best_alpha = sweep.rows[best].alpha;
    return sweep;
}

}  // namespace crepair::protocol
