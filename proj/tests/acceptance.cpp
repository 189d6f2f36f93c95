// Acceptance harness: one numbered criterion per function, each printing a
// single PASS/FAIL line. Exit status is nonzero when any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "crepair/cleanup.hpp"
#include "crepair/cli.hpp"
#include "crepair/compose.hpp"
#include "crepair/diagnostics.hpp"
#include "crepair/field_io.hpp"
#include "crepair/fields.hpp"
#include "crepair/hierarchy.hpp"
#include "crepair/opspec.hpp"
#include "crepair/protocol.hpp"
#include "crepair/rollout.hpp"
#include "crepair/spectral.hpp"
#include "crepair/synthetic.hpp"
#include "oracles.hpp"

using namespace crepair;

namespace {

struct check_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define ACCEPT(cond)                                                                   \
    do {                                                                               \
        if (!(cond))                                                                   \
            throw check_failure(std::string("line ") + std::to_string(__LINE__) +      \
                                ": " #cond);                                           \
    } while (0)

double sq_norm_diff(const VelocityField& a, const VelocityField& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.u_grid().data().size(); ++k) {
        const double du = a.u_grid().data()[k] - b.u_grid().data()[k];
        const double dv = a.v_grid().data()[k] - b.v_grid().data()[k];
        s += du * du + dv * dv;
    }
    return s;
}

double frob_norm_diff(const VelocityField& a, const VelocityField& b) {
    return std::sqrt(sq_norm_diff(a, b));
}

// ---------------------------------------------------------------- criterion 1
// Exact projector: idempotence, mean preservation, divergence annihilation,
// the Pythagorean split, and exactness on divergence-free targets.
void criterion_1() {
    for (int rep = 0; rep < 200; ++rep) {
        VelocityField x = oracles::random_field(64, 64, 1000 + rep);
        VelocityField px = spectral::hodge_project(x);

        ACCEPT(mse(spectral::hodge_project(px), px) < 1e-12);
        ACCEPT(std::abs(component_mean_u(px) - component_mean_u(x)) < 1e-13);
        ACCEPT(std::abs(component_mean_v(px) - component_mean_v(x)) < 1e-13);
        ACCEPT(spectral::spectral_divergence_rms(px) < 1e-10);

        // Pythagorean identity against a divergence-free reference target.
        VelocityField y = spectral::hodge_project(oracles::random_field(64, 64, 5000 + rep));
        const double total = sq_norm_diff(x, y);
        const double split = sq_norm_diff(px, y) + sq_norm_diff(x, px);
        ACCEPT(std::abs(total - split) <= 1e-10 * total);

        // Exact on targets that already live on the constraint manifold.
        ACCEPT(mse(spectral::hodge_project(y), y) < 1e-18);
    }
}

// ---------------------------------------------------------------- criterion 2
// Solver faithfulness: direct solve vs dense oracle, the consistency bound
// ||Q(x) - Q*(x)|| <= (||G|| / mu) ||r|| with dense constants, and Jacobi
// residual monotonicity.
void criterion_2() {
    for (int rep = 0; rep < 20; ++rep) {
        std::mt19937_64 rng(7000 + rep);
        std::uniform_real_distribution<double> lam_d(0.0, 4.0);
        const int h = 10, w = 10;
        const double lambda = lam_d(rng);
        cleanup::PoissonSystem sys = cleanup::PoissonSystem::screened(h, w, lambda);
        oracles::Matrix a = oracles::assemble_poisson(sys);
        const int dim = (h - 2) * (w - 2);

        VelocityField f = oracles::random_field(h, w, 7100 + rep);
        ScalarField rhs(h, w, 0.0);
        {
            ScalarField div = discrete_divergence(f);
            for (int i = 1; i < h - 1; ++i)
                for (int j = 1; j < w - 1; ++j) rhs(i, j) = -div(i, j);
        }

        // Direct solve against the dense LU oracle.
        cleanup::PressureSolve direct = cleanup::solve_pressure(sys, rhs, cleanup::SolverSpec::direct());
        std::vector<double> expect = oracles::lu_solve(a, oracles::interior_vector(rhs));
        std::vector<double> got = oracles::interior_vector(direct.p);
        double diff = 0.0, ref = 0.0;
        for (int k = 0; k < dim; ++k) {
            diff += (got[k] - expect[k]) * (got[k] - expect[k]);
            ref += expect[k] * expect[k];
        }
        ACCEPT(std::sqrt(diff) <= 1e-10 * std::max(std::sqrt(ref), 1e-30));

        // Dense pressure-to-velocity-update map G (2 H W x dim).
        oracles::Matrix g(static_cast<std::size_t>(2 * h * w) * dim, 0.0);
        for (int c = 0; c < dim; ++c) {
            std::vector<double> e(dim, 0.0);
            e[c] = 1.0;
            ScalarField p = oracles::interior_to_field(e, h, w);
            for (int i = 1; i < h - 1; ++i)
                for (int j = 1; j < w - 1; ++j) {
                    const double du = -(p(i, j + 1) - p(i, j));
                    const double dv = -(p(i + 1, j) - p(i, j));
                    oracles::at(g, dim, i * w + j, c) = du;
                    oracles::at(g, dim, h * w + i * w + j, c) = dv;
                }
        }
        const double g_norm = oracles::spectral_norm(g, 2 * h * w, dim);
        const double mu = oracles::min_eigenvalue_spd(a, dim);
        ACCEPT(mu > 0.0);

        VelocityField qstar = cleanup_apply(f, sys, cleanup::SolverSpec::direct());
        for (const cleanup::SolverSpec& solver :
             {cleanup::SolverSpec::jacobi(5), cleanup::SolverSpec::sor(5),
              cleanup::SolverSpec::cg(3), cleanup::SolverSpec::mg(1)}) {
            VelocityField q = cleanup_apply(f, sys, solver);
            cleanup::PressureSolve approx = cleanup::solve_pressure(sys, rhs, solver);
            const double r_norm = oracles::norm2(oracles::interior_vector(approx.residual));
            const double lhs = frob_norm_diff(q, qstar);
            ACCEPT(lhs <= (g_norm / mu) * r_norm + 1e-8);
        }

        // Jacobi residual is monotone non-increasing in the iteration budget.
        double prev = 1e300;
        for (int k : {5, 10, 20, 40}) {
            const double r = cleanup::relative_system_residual(f, sys, cleanup::SolverSpec::jacobi(k));
            ACCEPT(r <= prev + 1e-14);
            prev = r;
        }
    }
}

// ---------------------------------------------------------------- criterion 3
// Decoupling: the direct solver minimizes the system residual but not target
// distortion, and distortion (not residual) tracks in-loop rollout error.
void criterion_3() {
    auto targets = synthetic::generate_bounded_targets(synthetic::BoundedKind::channel_like, 64,
                                                       64, 55, 21);
    // The screened family gets a small iteration budget so its residual stays
    // honestly iterative; with the full default budget the heavily screened
    // systems are so well conditioned that plain Jacobi out-converges even the
    // direct solver's roundoff and the residual ranking becomes a tie at
    // machine precision.
    const std::vector<std::string> specs = {
        "jacobi:k=10",          "jacobi:k=40",
        "mg:cycles=2",          "cg:k=20",
        "direct",               "screened:lambda=1,k=5",
        "screened:lambda=2,k=5", "screened:lambda=4,k=5",
        "screened:lambda=8,k=5", "screened:lambda=16,k=5",
        "screened:lambda=32,k=5", "screened:lambda=64,k=5"};
    const int direct_index = 4;

    std::vector<double> distortion, residual, rollout_mse;
    for (const std::string& text : specs) {
        compose::CleanupSpec op = opspec::parse(text);
        diagnostics::OperatorAudit audit = diagnostics::audit_operator(op, targets);
        ACCEPT(audit.relative_residual.has_value());
        distortion.push_back(audit.distortion_mse.mean);
        residual.push_back(audit.relative_residual->mean);

        compose::CleanupSpec inloop = op;
        inloop.mode = compose::Mode::inloop;
        rollout::RolloutConfig cfg;
        cfg.horizon = 20;
        cfg.mode = rollout::Mode::inloop;
        cfg.op = inloop;
        auto pred = synthetic::make_replay_surrogate(targets, 0.005, 9);
        rollout::RolloutTrace trace = rollout::run_rollout(*pred, targets, cfg);
        ACCEPT(!trace.summary.blowup);
        rollout_mse.push_back(trace.summary.mse_at_T);
    }

    const auto argmin = [](const std::vector<double>& v) {
        return static_cast<int>(std::min_element(v.begin(), v.end()) - v.begin());
    };
    ACCEPT(argmin(residual) == direct_index);
    ACCEPT(argmin(distortion) != direct_index);

    ACCEPT(diagnostics::correlate(distortion, rollout_mse).pearson > 0.5);
    ACCEPT(diagnostics::correlate(residual, rollout_mse).pearson <= 0.0);
}

// ---------------------------------------------------------------- criterion 4
// Exact regime: in-loop projection < post hoc < raw at the final horizon, with
// at least a 5x gap to raw, and target-side repair (cap) agreeing with inloop.
void criterion_4() {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        synthetic::NSConfig cfg;
        cfg.grid = 64;
        cfg.nu = 1e-3;
        cfg.dt = 0.005;
        cfg.init_amplitude = 0.1;
        cfg.seed = seed;
        auto targets = synthetic::generate_periodic_trajectory(cfg, 50);

        synthetic::SurrogateSpec sspec;
        sspec.dynamics = cfg;
        sspec.sigma_c = 0.05;
        sspec.seed = seed + 100;
        auto pred = synthetic::make_surrogate(sspec);

        auto run = [&](rollout::Mode mode, const std::string& op_text) {
            rollout::RolloutConfig rcfg;
            rcfg.horizon = 50;
            rcfg.mode = mode;
            rcfg.op = opspec::parse(op_text);
            return rollout::run_rollout(*pred, targets, rcfg).summary;
        };
        const double raw = run(rollout::Mode::raw, "raw").mse_at_T;
        const double posthoc = run(rollout::Mode::posthoc, "fft").mse_at_T;
        const double inloop = run(rollout::Mode::inloop, "fft").mse_at_T;
        const double cap = run(rollout::Mode::cap, "fft").mse_at_T;

        ACCEPT(inloop < posthoc);
        ACCEPT(posthoc < raw);
        ACCEPT(inloop * 5.0 <= raw);
        ACCEPT(std::abs(cap - inloop) < 1e-10);
    }
}

// ---------------------------------------------------------------- criterion 5
// Approximate regime: in-loop direct cleanup lowers divergence but raises
// trajectory error on the bounded benchmark; the blend sweep prefers a small
// alpha there and full repair with the exact projector on periodic data.
void criterion_5() {
    auto targets = synthetic::generate_bounded_targets(synthetic::BoundedKind::channel_like, 64,
                                                       64, 55, 21);
    auto run = [&](rollout::Mode mode, const std::string& op_text) {
        rollout::RolloutConfig cfg;
        cfg.horizon = 50;
        cfg.mode = mode;
        cfg.op = opspec::parse(op_text);
        if (mode != rollout::Mode::raw) cfg.op.mode = compose::Mode::inloop;
        auto pred = synthetic::make_replay_surrogate(targets, 0.001, 9);
        return rollout::run_rollout(*pred, targets, cfg).summary;
    };
    rollout::RolloutSummary raw = run(rollout::Mode::raw, "raw");
    rollout::RolloutSummary direct = run(rollout::Mode::inloop, "direct");
    ACCEPT(direct.div_at_T < raw.div_at_T);
    ACCEPT(direct.mse_at_T > raw.mse_at_T);

    // Blend sweep on the mismatched benchmark: small alpha wins and full
    // repair is worse than none.
    compose::CleanupSpec op = opspec::parse("direct");
    op.mode = compose::Mode::inloop;
    auto pred = synthetic::make_replay_surrogate(targets, 0.001, 9);
    protocol::MismatchSweep sweep = protocol::sweep_mismatch(
        *pred, targets, op, {0.0, 0.05, 0.1, 0.2, 0.4, 0.6, 0.8, 1.0}, 50);
    ACCEPT(sweep.best_alpha <= 0.1);
    ACCEPT(sweep.rows.back().mse_at_T > sweep.rows.front().mse_at_T);

    // Exact projector on periodic data: full repair is optimal.
    synthetic::NSConfig cfg;
    cfg.grid = 32;
    cfg.nu = 1e-3;
    cfg.dt = 0.005;
    cfg.init_amplitude = 0.1;
    cfg.seed = 2;
    auto periodic = synthetic::generate_periodic_trajectory(cfg, 20);
    synthetic::SurrogateSpec sspec;
    sspec.dynamics = cfg;
    sspec.sigma_c = 0.05;
    sspec.seed = 7;
    auto spred = synthetic::make_surrogate(sspec);
    compose::CleanupSpec fft = opspec::parse("fft");
    fft.mode = compose::Mode::inloop;
    protocol::MismatchSweep exact = protocol::sweep_mismatch(
        *spred, periodic, fft, {0.0, 0.25, 0.5, 0.75, 1.0}, 20);
    ACCEPT(exact.best_alpha == 1.0);
}

// ---------------------------------------------------------------- criterion 6
// Rollout bound: the one-step recursion with dense-computed Lipschitz
// constants dominates simulated errors, domination is monotone in its inputs,
// and the geometric-series ceiling matches the recursion's limit.
void criterion_6() {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    for (int inst = 0; inst < 100; ++inst) {
        const int dim = 3 + static_cast<int>(unif(rng) * 6);
        const double target_norm = 0.3 + 0.6 * unif(rng);
        oracles::Matrix f(static_cast<std::size_t>(dim) * dim);
        for (double& v : f) v = gauss(rng);
        const double raw_norm = oracles::spectral_norm(f, dim, dim);
        for (double& v : f) v *= target_norm / raw_norm;
        const double l_f = oracles::spectral_norm(f, dim, dim);

        const double beta = 0.01 * unif(rng);
        const int horizon = 20;
        std::vector<double> y(dim), x(dim);
        for (double& v : y) v = gauss(rng);
        x = y;
        for (int k = 0; k < dim; ++k) x[k] += 0.1 * gauss(rng);
        std::vector<double> e0_diff(dim);
        for (int k = 0; k < dim; ++k) e0_diff[k] = x[k] - y[k];

        rollout::BoundTraceInputs inputs;
        inputs.l_t = 1.0;
        inputs.l_f = l_f;
        inputs.b0 = oracles::norm2(e0_diff);
        std::vector<double> errors;
        for (int t = 0; t < horizon; ++t) {
            std::vector<double> fy = oracles::matvec(f, dim, dim, y);
            std::vector<double> fx = oracles::matvec(f, dim, dim, x);
            std::vector<double> drift(dim), noise(dim);
            for (double& v : drift) v = gauss(rng);
            for (double& v : noise) v = gauss(rng);
            const double dn = oracles::norm2(drift), nn = oracles::norm2(noise);
            const double drift_scale = 0.1 * unif(rng) / std::max(dn, 1e-30);
            const double noise_scale = beta / std::max(nn, 1e-30);
            for (int k = 0; k < dim; ++k) {
                y[k] = fy[k] + drift[k] * drift_scale;
                x[k] = fx[k] + noise[k] * noise_scale;
            }
            inputs.delta.push_back(dn * drift_scale);
            inputs.beta.push_back(nn * noise_scale);
            std::vector<double> d(dim);
            for (int k = 0; k < dim; ++k) d[k] = x[k] - y[k];
            errors.push_back(oracles::norm2(d));
        }
        rollout::BoundReport report = rollout::check_rollout_bound(errors, inputs);
        ACCEPT(!report.violated);
        for (double m : report.margin) ACCEPT(m >= -1e-9);
    }

    // Monotonicity fuzz: enlarging b0, L_T, and beta never shrinks the bound.
    for (int draw = 0; draw < 1000; ++draw) {
        rollout::BoundTraceInputs a;
        a.l_t = 0.5 + unif(rng);
        a.l_f = 0.1 + 0.9 * unif(rng);
        a.b0 = unif(rng);
        for (int t = 0; t < 10; ++t) {
            a.delta.push_back(unif(rng));
            a.beta.push_back(unif(rng));
        }
        rollout::BoundTraceInputs b = a;
        b.l_t += 0.5 * unif(rng);
        b.b0 += unif(rng);
        for (double& v : b.beta) v += unif(rng);
        ACCEPT(rollout::bound_domination_check(a, b));
    }

    // Steady state of the constant-input recursion matches the closed form.
    for (int rep = 0; rep < 20; ++rep) {
        const double l_t = 0.5 + 0.5 * unif(rng);
        const double l_f = unif(rng) * std::min(0.99 / l_t, 1.0) * 0.95;
        const double delta_bar = unif(rng), beta_bar = unif(rng);
        rollout::BoundTraceInputs inputs;
        inputs.l_t = l_t;
        inputs.l_f = l_f;
        inputs.b0 = unif(rng);
        const int steps = 2000;
        inputs.delta.assign(steps, delta_bar);
        inputs.beta.assign(steps, beta_bar);
        rollout::BoundReport rep_out =
            rollout::check_rollout_bound(std::vector<double>(steps, 0.0), inputs);
        const double limit = rollout::steady_state_bound(l_t, l_f, delta_bar, beta_bar);
        ACCEPT(std::abs(rep_out.bound.back() - limit) <= 0.05 * limit + 1e-12);
    }
}

// ---------------------------------------------------------------- criterion 7
// Closed-form blend optimum vs brute-force grid minimization of the actual
// squared error, covering the zero-increment and non-descent branches.
void criterion_7() {
    const int grid_points = 10001;
    for (int rep = 0; rep < 1000; ++rep) {
        VelocityField x = oracles::random_field(4, 4, 30000 + rep);
        VelocityField y = oracles::random_field(4, 4, 40000 + rep);
        VelocityField cleaned = oracles::random_field(4, 4, 50000 + rep);
        if (rep % 10 == 0) cleaned = x;  // zero-increment branch
        if (rep % 10 == 3) {
            // <x - y, c> >= 0 branch: move the cleaned state away from y.
            cleaned = field_axpy(x, y, -1.0);  // x + (x - y)
        }

        compose::AlphaResult result = compose::optimal_alpha(x, y, cleaned);

        double best_val = 1e300;
        double best_alpha = 0.0;
        for (int g = 0; g < grid_points; ++g) {
            const double alpha = static_cast<double>(g) / (grid_points - 1);
            VelocityField xa = compose::blend(x, cleaned, alpha);
            const double val = sq_norm_diff(xa, y);
            if (val < best_val) {
                best_val = val;
                best_alpha = alpha;
            }
        }
        const double closed = result.phi(result.alpha_star);
        ACCEPT(std::abs(closed - best_val) <= 1e-6 * (1.0 + best_val));
        if (!result.all_optimal)
            ACCEPT(std::abs(result.alpha_star - best_alpha) <= 1.0 / (grid_points - 1) + 1e-12);
    }
}

// ---------------------------------------------------------------- criterion 8
// Reconciliation: exactness on coherent inputs, OLS against the dense
// least-squares oracle, the top-down fixed-point dichotomy, and the worked
// three-node projection.
void criterion_8() {
    std::mt19937_64 rng(321);
    std::normal_distribution<double> gauss;

    std::vector<synthetic::HierarchySeries> pool;
    for (int k = 0; k < 10; ++k)
        pool.push_back(synthetic::generate_hierarchy_series(2 + k % 2, 2 + k % 3, 1, 600 + k));

    for (int rep = 0; rep < 1000; ++rep) {
        const hierarchy::Hierarchy& h = pool[rep % pool.size()].tree;
        std::vector<double> z(h.num_bottom());
        for (double& v : z) v = gauss(rng);
        std::vector<double> x = h.apply_s(z);

        for (auto* reconcile : {&hierarchy::reconcile_ols, &hierarchy::reconcile_bottom_up}) {
            std::vector<double> out = (*reconcile)(h, x);
            double sum_sq = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i)
                sum_sq += (out[i] - x[i]) * (out[i] - x[i]);
            ACCEPT(sum_sq / x.size() < 1e-18);
        }

        // Incoherent input: OLS equals the dense least-squares projection.
        std::vector<double> y(h.num_nodes());
        for (double& v : y) v = gauss(rng);
        std::vector<double> got = hierarchy::reconcile_ols(h, y);
        std::vector<double> zs =
            oracles::least_squares(h.s_row_major(), h.num_nodes(), h.num_bottom(), y);
        std::vector<double> expect = h.apply_s(zs);
        double diff = 0.0;
        for (std::size_t i = 0; i < got.size(); ++i)
            diff += (got[i] - expect[i]) * (got[i] - expect[i]);
        ACCEPT(std::sqrt(diff / got.size()) < 1e-10);
    }

    // Worked example and the top-down dichotomy.
    hierarchy::Hierarchy three({1, 1, 1, 0, 0, 1}, 3, 2, 0, {1, 2});
    std::vector<double> proj = hierarchy::reconcile_ols(three, {4, 1, 2});
    ACCEPT(std::abs(proj[0] - 11.0 / 3.0) < 1e-12);
    ACCEPT(std::abs(proj[1] - 4.0 / 3.0) < 1e-12);
    ACCEPT(std::abs(proj[2] - 7.0 / 3.0) < 1e-12);

    hierarchy::Proportions p{{0.5, 0.5}};
    std::vector<double> fixed = hierarchy::reconcile_top_down(three, p, {4, 2, 2}, 1.0);
    ACCEPT(std::abs(fixed[0] - 4.0) < 1e-14 && std::abs(fixed[1] - 2.0) < 1e-14 &&
           std::abs(fixed[2] - 2.0) < 1e-14);
    std::vector<double> moved = hierarchy::reconcile_top_down(three, p, {3, 1, 2}, 1.0);
    ACCEPT(std::abs(moved[1] - 1.5) < 1e-14 && std::abs(moved[2] - 1.5) < 1e-14);
    ACCEPT(std::abs(moved[1] - 1.0) > 0.1);  // genuinely displaced
}

// ---------------------------------------------------------------- criterion 9
// Selection protocol: repeated runs are bit-identical and the direct solver is
// never chosen on the mismatched bounded benchmark.
void criterion_9() {
    auto targets = synthetic::generate_bounded_targets(synthetic::BoundedKind::channel_like, 32,
                                                       32, 25, 3);
    std::vector<std::vector<VelocityField>> val{{targets.begin(), targets.begin() + 12}};
    std::vector<std::vector<VelocityField>> test{{targets.begin() + 12, targets.end()}};

    protocol::CandidateMenu menu;
    for (const std::string& text :
         {"raw", "screened:lambda=8,k=20,solver=jacobi", "screened:lambda=16,k=20,solver=jacobi",
          "direct"}) {
        compose::CleanupSpec spec = opspec::parse(text);
        if (spec.base != compose::BaseKind::raw) spec.mode = compose::Mode::inloop;
        menu.candidates.push_back(spec);
    }

    std::vector<protocol::SelectionReport> reports;
    for (int run = 0; run < 3; ++run) {
        auto pred = synthetic::make_replay_surrogate(val[0], 0.002, 9);
        reports.push_back(protocol::select_operator(menu, *pred, val, test, 10));
    }
    for (int run = 1; run < 3; ++run) {
        ACCEPT(reports[run].selected_index == reports[0].selected_index);
        ACCEPT(reports[run].selected_spec == reports[0].selected_spec);
        ACCEPT(reports[run].validation.size() == reports[0].validation.size());
        for (std::size_t i = 0; i < reports[0].validation.size(); ++i) {
            ACCEPT(reports[run].validation[i].val_mse_at_T ==
                   reports[0].validation[i].val_mse_at_T);
            ACCEPT(reports[run].validation[i].val_div_at_T ==
                   reports[0].validation[i].val_div_at_T);
        }
        ACCEPT(reports[run].test.size() == reports[0].test.size());
        for (std::size_t i = 0; i < reports[0].test.size(); ++i)
            ACCEPT(reports[run].test[i].test_mse_at_T == reports[0].test[i].test_mse_at_T);
    }
    ACCEPT(reports[0].selected_spec != "direct");
}

// --------------------------------------------------------------- criterion 10
// Formats and CLI: bit-exact serialization round trips and byte-identical CSV
// output across reruns and worker counts.
void criterion_10() {
    // In-memory round trips preserve every bit, including signed zero and
    // subnormal-range magnitudes.
    VelocityField f = oracles::random_field(9, 13, 77);
    f.u(0, 0) = -0.0;
    f.v(8, 12) = 1e-308;
    std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
    write_vf01(ss, f);
    VelocityField back = read_vf01(ss);
    ACCEPT(std::memcmp(f.u_grid().data().data(), back.u_grid().data().data(),
                       f.u_grid().data().size() * sizeof(double)) == 0);
    ACCEPT(std::memcmp(f.v_grid().data().data(), back.v_grid().data().data(),
                       f.v_grid().data().size() * sizeof(double)) == 0);

    std::vector<VelocityField> frames{oracles::random_field(6, 7, 1),
                                      oracles::random_field(6, 7, 2),
                                      oracles::random_field(6, 7, 3)};
    std::stringstream ts(std::ios::in | std::ios::out | std::ios::binary);
    write_vt01(ts, frames);
    std::vector<VelocityField> frames_back = read_vt01(ts);
    ACCEPT(frames_back.size() == frames.size());
    for (std::size_t k = 0; k < frames.size(); ++k)
        ACCEPT(std::memcmp(frames[k].u_grid().data().data(),
                           frames_back[k].u_grid().data().data(),
                           frames[k].u_grid().data().size() * sizeof(double)) == 0);

    // CLI determinism: identical seeds reproduce identical bytes, and the
    // worker count does not change any output.
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "crepair_acceptance_cli";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto run_cli = [](const std::vector<std::string>& args) {
        std::vector<const char*> argv{"crepair"};
        for (const std::string& a : args) argv.push_back(a.c_str());
        return cli::run(static_cast<int>(argv.size()), argv.data());
    };
    auto slurp = [](const fs::path& p) {
        std::ifstream is(p, std::ios::binary);
        std::ostringstream os;
        os << is.rdbuf();
        return os.str();
    };

    const std::string t1 = (dir / "t1.vt01").string(), t2 = (dir / "t2.vt01").string();
    for (const std::string& out : {t1, t2})
        ACCEPT(run_cli({"generate", "bounded", "--kind", "channel_like", "--height", "24",
                        "--width", "24", "--count", "6", "--seed", "8", "--out", out}) == 0);
    ACCEPT(slurp(t1) == slurp(t2));

    const std::string a = (dir / "a").string(), b = (dir / "b").string();
    for (const auto& [out, jobs] : {std::pair{a, "1"}, std::pair{b, "4"}})
        ACCEPT(run_cli({"audit", "--op", "fft", "--op", "direct", "--op", "jacobi:k=10", "--op",
                        "screened:lambda=8,k=10", "--targets", t1, "--strip-width", "2",
                        "--jobs", jobs, "--out", out}) == 0);
    ACCEPT(slurp(a + ".audit.csv") == slurp(b + ".audit.csv"));
    ACCEPT(slurp(a + ".strip.csv") == slurp(b + ".strip.csv"));
    fs::remove_all(dir);
}

}  // namespace

int main() {
    const std::vector<std::pair<int, std::function<void()>>> criteria = {
        {1, criterion_1}, {2, criterion_2}, {3, criterion_3}, {4, criterion_4},
        {5, criterion_5}, {6, criterion_6}, {7, criterion_7}, {8, criterion_8},
        {9, criterion_9}, {10, criterion_10}};

    int failures = 0;
    for (const auto& [number, fn] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string message;
        try {
            fn();
        } catch (const std::exception& e) {
            message = e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (message.empty()) {
            std::cout << "criterion " << number << ": PASS (" << secs << " s)\n";
        } else {
            std::cout << "criterion " << number << ": FAIL (" << message << ")\n";
            ++failures;
        }
        std::cout.flush();
    }
    return failures == 0 ? 0 : 1;
}
