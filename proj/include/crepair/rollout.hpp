#ifndef CREPAIR_ROLLOUT_HPP
#define CREPAIR_ROLLOUT_HPP

#include <optional>
#include <vector>

#include "crepair/compose.hpp"
#include "crepair/fields.hpp"
#include "crepair/synthetic.hpp"

namespace crepair::rollout {

enum class Mode { raw, posthoc, inloop, cap };

/// Rollout configuration. theta_stable defaults to 10x the step-1 MSE of the
/// raw run when not supplied; both thresholds are echoed in the summary.
struct RolloutConfig {
    int horizon = 1;
    Mode mode = Mode::raw;
    compose::CleanupSpec op;
    double theta_blow = 1e6;
    std::optional<double> theta_stable;
    NormFrame frame = NormFrame::identity();
    bool keep_states = false;

    void validate() const;
};

struct StepRecord {
    int step = 0;
    double mse = 0.0;
    double div_rms = 0.0;
};

struct RolloutSummary {
    double mse_auc = 0.0;   // mean per-step MSE over recorded steps
    double mse_at_T = 0.0;  // last recorded step
    double div_at_T = 0.0;
    int stable_len = 0;
    bool blowup = false;
    double theta_stable_used = 0.0;
    double theta_blow_used = 0.0;
};

struct RolloutTrace {
    std::vector<StepRecord> steps;
    RolloutSummary summary;
    std::vector<VelocityField> states;  // populated when keep_states is set
};

/// Autoregressive rollout against a target trajectory. raw evolves the bare
/// predictor; inloop applies the operator to each new state; posthoc evolves
/// raw but scores a cleaned copy per step; cap is inloop with targets also
/// passed through the operator before scoring. Non-finite states truncate the
/// trace and set the blow-up flag.
RolloutTrace run_rollout(synthetic::Predictor& predictor,
                         const std::vector<VelocityField>& targets, const RolloutConfig& cfg);

/// Summary statistics recomputed from per-step records.
RolloutSummary rollout_metrics(const std::vector<StepRecord>& steps, int horizon,
                               double theta_stable, double theta_blow);

/// Inputs for the one-step error recursion b_{t+1} = L_T L_F b_t + L_T d_t +
/// beta_{t+1}. delta[t] and beta[t] feed the step from t to t+1.
struct BoundTraceInputs {
    double l_t = 1.0;
    double l_f = 1.0;
    double b0 = 0.0;
    std::vector<double> delta;
    std::vector<double> beta;

    void validate() const;
};

struct BoundReport {
    std::vector<double> bound;   // b_t, t = 1..T
    std::vector<double> margin;  // b_t - e_t
    bool violated = false;
};

/// Evaluate the recursion against observed per-step error norms e_t
/// (t = 1..T). A negative margin is reported, not thrown: it means the
/// supplied constants are not valid Lipschitz bounds.
BoundReport check_rollout_bound(const std::vector<double>& errors,
                                const BoundTraceInputs& inputs);

/// Monotonicity self-test: with b0_1 <= b0_2, l_t1 <= l_t2, beta_1 <= beta_2
/// (same l_f and delta), the first recursion must stay below the second.
bool bound_domination_check(const BoundTraceInputs& a, const BoundTraceInputs& b);

/// Steady-state ceiling (l_t * delta_bar + beta_bar) / (1 - l_t * l_f);
/// requires the contraction l_t * l_f < 1.
double steady_state_bound(double l_t, double l_f, double delta_bar, double beta_bar);

}  // namespace crepair::rollout

#endif
