#ifndef CREPAIR_PROTOCOL_HPP
#define CREPAIR_PROTOCOL_HPP

#include <string>
#include <vector>

#include "crepair/cleanup.hpp"
#include "crepair/compose.hpp"
#include "crepair/rollout.hpp"
#include "crepair/synthetic.hpp"

namespace crepair::protocol {

/// Candidate operator menu. Must contain the raw baseline exactly once and a
/// direct-solver anchor; each entry carries its own hyperparameters and the
/// rollout mode it is evaluated under.
struct CandidateMenu {
    std::vector<compose::CleanupSpec> candidates;
    void validate() const;
};

struct CandidateRow {
    std::string spec;
    double val_mse_at_T = 0.0;
    double val_div_at_T = 0.0;
};

struct TestRow {
    std::string label;  // "selected", "raw", "direct"
    std::string spec;
    double test_mse_at_T = 0.0;
    double test_div_at_T = 0.0;
};

struct SelectionReport {
    std::vector<CandidateRow> validation;  // menu order
    int selected_index = -1;
    std::string selected_spec;
    std::vector<TestRow> test;  // selected plus raw/direct anchors
};

/// Evaluate every candidate on validation rollouts, select by final-horizon
/// MSE (ties broken by simplicity then spec string), then evaluate only the
/// selected operator and the raw/direct anchors on the test split.
SelectionReport select_operator(const CandidateMenu& menu, synthetic::Predictor& predictor,
                                const std::vector<std::vector<VelocityField>>& val_targets,
                                const std::vector<std::vector<VelocityField>>& test_targets,
                                int t_eval);

/// Tie-break complexity rank: raw < fft < screened/iterative < gated or
/// blended < geo-screened < direct-solver.
int simplicity_rank(const compose::CleanupSpec& spec);

struct ScreenedSweepRow {
    double lambda = 0.0;
    double mse_at_T = 0.0;
    double mse_auc = 0.0;
    double div_at_T = 0.0;
    double distortion = 0.0;  // mean target distortion MSE over the trajectory
};

/// In-loop rollout metrics plus target distortion for each screening shift.
std::vector<ScreenedSweepRow> sweep_screened(synthetic::Predictor& predictor,
                                             const std::vector<VelocityField>& targets,
                                             const std::vector<double>& lambdas,
                                             const cleanup::SolverSpec& solver, int t_eval);

struct MismatchRow {
    double alpha = 0.0;
    double mse_at_T = 0.0;
    double div_at_T = 0.0;
};

struct MismatchSweep {
    std::vector<MismatchRow> rows;
    double best_alpha = 0.0;  // argmin of mse_at_T, smaller alpha on ties
};

/// Blend-strength sweep of the given operator applied in-loop.
MismatchSweep sweep_mismatch(synthetic::Predictor& predictor,
                             const std::vector<VelocityField>& targets,
                             const compose::CleanupSpec& op, const std::vector<double>& alphas,
                             int t_eval);

}  // namespace crepair::protocol

#endif
