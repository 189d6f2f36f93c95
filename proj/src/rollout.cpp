#include "crepair/rollout.hpp"

#include <algorithm>
#include <cmath>

namespace crepair::rollout {
namespace {

VelocityField apply_op(const compose::CleanupSpec& op, const NormFrame& frame,
                       const VelocityField& f) {
    return compose::framed_apply(f, op, frame);
}

double raw_step1_mse(synthetic::Predictor& predictor,
                     const std::vector<VelocityField>& targets) {
    predictor.reset();
    VelocityField first = predictor(targets[0]);
    return mse(first, targets[1]);
}

}  // namespace

void RolloutConfig::validate() const {
    if (horizon < 1) throw config_error("RolloutConfig: horizon must be at least 1");
    if (!(theta_blow > 0.0)) throw config_error("RolloutConfig: theta_blow must be positive");
    if (theta_stable && !(*theta_stable > 0.0))
        throw config_error("RolloutConfig: theta_stable must be positive");
    op.validate();
    frame.validate();
}

RolloutSummary rollout_metrics(const std::vector<StepRecord>& steps, int horizon,
                               double theta_stable, double theta_blow) {
    if (steps.empty()) throw config_error("rollout_metrics: empty trace");
    RolloutSummary s;
    s.theta_stable_used = theta_stable;
    s.theta_blow_used = theta_blow;
    double sum = 0.0;
    bool stable_so_far = true;
    for (const StepRecord& r : steps) {
        sum += r.mse;
        const bool finite = std::isfinite(r.mse);
        if (!finite || r.mse > theta_blow) s.blowup = true;
        if (stable_so_far && finite && r.mse <= theta_stable)
            s.stable_len = r.step;
        else
            stable_so_far = false;
    }
    if (static_cast<int>(steps.size()) < horizon) s.blowup = true;  // truncated
    s.mse_auc = sum / static_cast<double>(steps.size());
    s.mse_at_T = steps.back().mse;
    s.div_at_T = steps.back().div_rms;
    return s;
}

RolloutTrace run_rollout(synthetic::Predictor& predictor,
                         const std::vector<VelocityField>& targets, const RolloutConfig& cfg) {
    cfg.validate();
    if (static_cast<int>(targets.size()) < cfg.horizon + 1)
        throw config_error("run_rollout: horizon exceeds target trajectory length");

    const double theta_stable =
        cfg.theta_stable ? *cfg.theta_stable : 10.0 * raw_step1_mse(predictor, targets);

    predictor.reset();
    RolloutTrace trace;
    trace.steps.reserve(static_cast<std::size_t>(cfg.horizon));

    VelocityField state = targets[0];
    for (int t = 1; t <= cfg.horizon; ++t) {
        VelocityField next = predictor(state);
        if (!next.all_finite()) break;

        if (cfg.mode == Mode::inloop || cfg.mode == Mode::cap)
            next = apply_op(cfg.op, cfg.frame, next);
        if (!next.all_finite()) break;

        VelocityField eval_state =
            cfg.mode == Mode::posthoc ? apply_op(cfg.op, cfg.frame, next) : next;
        VelocityField eval_target =
            cfg.mode == Mode::cap ? apply_op(cfg.op, cfg.frame, targets[t]) : targets[t];

        StepRecord rec;
        rec.step = t;
        rec.mse = mse(eval_state, eval_target);
        rec.div_rms = divergence_rms(eval_state);
        trace.steps.push_back(rec);
        if (cfg.keep_states) trace.states.push_back(eval_state);

        state = std::move(next);
        if (!std::isfinite(rec.mse)) break;
    }
    if (trace.steps.empty())
        throw numeric_error("run_rollout: first prediction was non-finite");
    trace.summary = rollout_metrics(trace.steps, cfg.horizon, theta_stable, cfg.theta_blow);
    return trace;
}

void BoundTraceInputs::validate() const {
    if (l_t < 0.0 || l_f < 0.0 || b0 < 0.0)
        throw config_error("BoundTraceInputs: factors must be non-negative");
    for (double d : delta)
        if (d < 0.0) throw config_error("BoundTraceInputs: delta must be non-negative");
    for (double b : beta)
        if (b < 0.0) throw config_error("BoundTraceInputs: beta must be non-negative");
}

BoundReport check_rollout_bound(const std::vector<double>& errors,
                                const BoundTraceInputs& inputs) {
    inputs.validate();
    const std::size_t t_max = errors.size();
    if (inputs.delta.size() < t_max || inputs.beta.size() < t_max)
        throw config_error("check_rollout_bound: delta/beta shorter than the error trace");
    BoundReport rep;
    rep.bound.reserve(t_max);
    rep.margin.reserve(t_max);
    double b = inputs.b0;
    for (std::size_t t = 0; t < t_max; ++t) {
        b = inputs.l_t * inputs.l_f * b + inputs.l_t * inputs.delta[t] + inputs.beta[t];
        rep.bound.push_back(b);
        rep.margin.push_back(b - errors[t]);
        if (rep.margin.back() < 0.0) rep.violated = true;
    }
    return rep;
}

bool bound_domination_check(const BoundTraceInputs& a, const BoundTraceInputs& b) {
    a.validate();
    b.validate();
    if (a.l_f != b.l_f || a.delta != b.delta)
        throw config_error("bound_domination_check: requires identical l_f and delta");
    if (a.b0 > b.b0 || a.l_t > b.l_t)
        throw config_error("bound_domination_check: first inputs must not exceed second");
    const std::size_t t_max = std::min(a.beta.size(), b.beta.size());
    for (std::size_t t = 0; t < t_max; ++t)
        if (a.beta[t] > b.beta[t])
            throw config_error("bound_domination_check: first beta must not exceed second");
    double ba = a.b0, bb = b.b0;
    for (std::size_t t = 0; t < t_max; ++t) {
        ba = a.l_t * a.l_f * ba + a.l_t * a.delta[t] + a.beta[t];
        bb = b.l_t * b.l_f * bb + b.l_t * b.delta[t] + b.beta[t];
        if (ba > bb) return false;
    }
    return true;
}

double steady_state_bound(double l_t, double l_f, double delta_bar, double beta_bar) {
    if (!(l_t * l_f < 1.0))
        throw config_error("steady_state_bound: requires the contraction l_t * l_f < 1");
    return (l_t * delta_bar + beta_bar) / (1.0 - l_t * l_f);
}

}  // namespace crepair::rollout
