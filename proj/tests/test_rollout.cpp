#include <cmath>
#include <random>

#include "crepair/diagnostics.hpp"
#include "crepair/opspec.hpp"
#include "crepair/rollout.hpp"
#include "crepair/spectral.hpp"
#include "crepair/synthetic.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace crepair;
using namespace crepair::rollout;

namespace {

// Deterministic scripted predictor: returns a fixed sequence of fields,
// ignoring its input.
class ScriptedPredictor : public synthetic::Predictor {
  public:
    explicit ScriptedPredictor(std::vector<VelocityField> frames)
        : frames_(std::move(frames)) {}
    VelocityField operator()(const VelocityField&) override { return frames_.at(step_++); }
    void reset() override { step_ = 0; }

  private:
    std::vector<VelocityField> frames_;
    std::size_t step_ = 0;
};

std::vector<VelocityField> periodic_targets(int steps, std::uint64_t seed) {
    synthetic::NSConfig cfg;
    cfg.grid = 32;
    cfg.nu = 1e-3;
    cfg.dt = 0.005;
    cfg.init_amplitude = 0.2;
    cfg.seed = seed;
    return synthetic::generate_periodic_trajectory(cfg, steps);
}

}  // namespace

TEST_CASE("identity operator makes all four modes identical") {
    auto targets = periodic_targets(8, 1);
    synthetic::SurrogateSpec spec;
    spec.dynamics.grid = 32;
    spec.dynamics.nu = 1e-3;
    spec.dynamics.dt = 0.005;
    spec.dynamics.seed = 1;
    spec.sigma_c = 0.05;
    spec.seed = 4;
    auto pred = synthetic::make_surrogate(spec);

    std::vector<RolloutTrace> traces;
    for (Mode m : {Mode::raw, Mode::posthoc, Mode::inloop, Mode::cap}) {
        RolloutConfig cfg;
        cfg.horizon = 8;
        cfg.mode = m;
        cfg.op = opspec::parse("raw");
        traces.push_back(run_rollout(*pred, targets, cfg));
    }
    for (std::size_t m = 1; m < traces.size(); ++m) {
        REQUIRE(traces[m].steps.size() == traces[0].steps.size());
        for (std::size_t t = 0; t < traces[0].steps.size(); ++t) {
            CHECK(traces[m].steps[t].mse == traces[0].steps[t].mse);
            CHECK(traces[m].steps[t].div_rms == traces[0].steps[t].div_rms);
        }
    }
}

TEST_CASE("perfect predictor with the exact projector is error free") {
    auto targets = periodic_targets(6, 2);
    synthetic::SurrogateSpec spec;
    spec.dynamics.grid = 32;
    spec.dynamics.nu = 1e-3;
    spec.dynamics.dt = 0.005;
    spec.dynamics.seed = 2;
    auto pred = synthetic::make_surrogate(spec);

    RolloutConfig cfg;
    cfg.horizon = 6;
    cfg.mode = Mode::inloop;
    cfg.op = opspec::parse("fft");
    cfg.theta_stable = 1.0;
    RolloutTrace trace = run_rollout(*pred, targets, cfg);
    CHECK(trace.summary.mse_at_T < 1e-18);
    CHECK(!trace.summary.blowup);
}

TEST_CASE("inloop projection beats raw under compressible noise") {
    auto targets = periodic_targets(20, 3);
    synthetic::SurrogateSpec spec;
    spec.dynamics.grid = 32;
    spec.dynamics.nu = 1e-3;
    spec.dynamics.dt = 0.005;
    spec.dynamics.seed = 3;
    spec.sigma_c = 0.05;
    spec.seed = 8;
    auto pred = synthetic::make_surrogate(spec);

    auto run_mode = [&](Mode m, const char* op) {
        RolloutConfig cfg;
        cfg.horizon = 20;
        cfg.mode = m;
        cfg.op = opspec::parse(op);
        return run_rollout(*pred, targets, cfg).summary.mse_at_T;
    };
    const double raw = run_mode(Mode::raw, "raw");
    const double posthoc = run_mode(Mode::posthoc, "fft");
    const double inloop = run_mode(Mode::inloop, "fft");
    CHECK(inloop < posthoc);
    CHECK(posthoc < raw);
    CHECK(inloop * 2.0 < raw);
}

TEST_CASE("cap and inloop agree for the exact projector on fixed-point targets") {
    auto targets = periodic_targets(10, 4);
    synthetic::SurrogateSpec spec;
    spec.dynamics.grid = 32;
    spec.dynamics.nu = 1e-3;
    spec.dynamics.dt = 0.005;
    spec.dynamics.seed = 4;
    spec.sigma_c = 0.05;
    spec.seed = 9;
    auto pred = synthetic::make_surrogate(spec);

    RolloutConfig cfg;
    cfg.horizon = 10;
    cfg.op = opspec::parse("fft");
    cfg.mode = Mode::inloop;
    RolloutTrace inloop = run_rollout(*pred, targets, cfg);
    cfg.mode = Mode::cap;
    RolloutTrace cap = run_rollout(*pred, targets, cfg);
    for (std::size_t t = 0; t < inloop.steps.size(); ++t)
        CHECK(std::abs(inloop.steps[t].mse - cap.steps[t].mse) < 1e-12);
}

TEST_CASE("posthoc cleaning is never fed back into the state") {
    // With a scripted predictor the raw state sequence must match the raw
    // rollout even when posthoc metrics use the projector.
    auto targets = periodic_targets(5, 5);
    std::vector<VelocityField> script;
    for (int t = 0; t < 5; ++t) script.push_back(oracles::random_field(32, 32, 300 + t));
    ScriptedPredictor pred(script);

    RolloutConfig cfg;
    cfg.horizon = 5;
    cfg.mode = Mode::posthoc;
    cfg.op = opspec::parse("fft");
    cfg.keep_states = true;
    cfg.theta_stable = 1.0;
    RolloutTrace trace = run_rollout(pred, targets, cfg);
    REQUIRE(trace.steps.size() == 5);
    for (int t = 0; t < 5; ++t) {
        // Scored state is the projected copy of the scripted raw state.
        VelocityField projected = spectral::hodge_project(script[t]);
        CHECK(mse(trace.states[t], projected) < 1e-24);
        CHECK(trace.steps[t].mse == doctest::Approx(mse(projected, targets[t + 1])).epsilon(1e-12));
    }
}

TEST_CASE("rollout metrics definitions") {
    SUBCASE("constant trace") {
        std::vector<StepRecord> steps;
        for (int t = 1; t <= 4; ++t) steps.push_back({t, 3.0, 0.5});
        RolloutSummary s = rollout_metrics(steps, 4, 10.0, 1e6);
        CHECK(s.mse_auc == doctest::Approx(3.0));
        CHECK(s.mse_at_T == 3.0);
        CHECK(s.div_at_T == 0.5);
        CHECK(s.stable_len == 4);
        CHECK(!s.blowup);
    }
    SUBCASE("monotone trace with theta_stable = 2.5 gives stable length 2") {
        std::vector<StepRecord> steps;
        for (int t = 1; t <= 4; ++t) steps.push_back({t, static_cast<double>(t), 0.0});
        RolloutSummary s = rollout_metrics(steps, 4, 2.5, 1e6);
        CHECK(s.stable_len == 2);
        CHECK(s.mse_auc == doctest::Approx(2.5));
        CHECK(s.mse_at_T == 4.0);
    }
    SUBCASE("blow-up flags") {
        std::vector<StepRecord> steps{{1, 1.0, 0.0}, {2, 2e6, 0.0}};
        RolloutSummary s = rollout_metrics(steps, 2, 10.0, 1e6);
        CHECK(s.blowup);
        std::vector<StepRecord> truncated{{1, 1.0, 0.0}};
        CHECK(rollout_metrics(truncated, 5, 10.0, 1e6).blowup);  // fewer steps than horizon
    }
    SUBCASE("random trace matches independent recomputation") {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> uni(0.0, 5.0);
        std::vector<StepRecord> steps;
        for (int t = 1; t <= 20; ++t) steps.push_back({t, uni(rng), uni(rng)});
        const double theta_stable = 2.0, theta_blow = 4.9;
        RolloutSummary s = rollout_metrics(steps, 20, theta_stable, theta_blow);
        double sum = 0.0;
        int stable = 0;
        bool blow = false, still = true;
        for (const auto& r : steps) {
            sum += r.mse;
            if (r.mse > theta_blow) blow = true;
            if (still && r.mse <= theta_stable)
                stable = r.step;
            else
                still = false;
        }
        CHECK(s.mse_auc == doctest::Approx(sum / 20.0).epsilon(1e-14));
        CHECK(s.stable_len == stable);
        CHECK(s.blowup == blow);
    }
}

TEST_CASE("non-finite prediction truncates the trace and flags blow-up") {
    auto targets = periodic_targets(6, 6);
    std::vector<VelocityField> script;
    for (int t = 0; t < 6; ++t) script.push_back(oracles::random_field(32, 32, 400 + t));
    script[3].u(0, 0) = std::nan("");
    ScriptedPredictor pred(script);

    RolloutConfig cfg;
    cfg.horizon = 6;
    cfg.mode = Mode::raw;
    cfg.op = opspec::parse("raw");
    cfg.theta_stable = 1e9;
    RolloutTrace trace = run_rollout(pred, targets, cfg);
    CHECK(trace.steps.size() == 3);
    CHECK(trace.summary.blowup);
}

TEST_CASE("horizon exceeding the target trajectory is rejected") {
    auto targets = periodic_targets(3, 7);
    synthetic::SurrogateSpec spec;
    spec.dynamics.grid = 32;
    spec.dynamics.seed = 7;
    auto pred = synthetic::make_surrogate(spec);
    RolloutConfig cfg;
    cfg.horizon = 10;
    cfg.mode = Mode::raw;
    cfg.op = opspec::parse("raw");
    CHECK_THROWS_AS(run_rollout(*pred, targets, cfg), config_error);
}

TEST_CASE("theta_stable defaults to ten times the raw step-1 error") {
    auto targets = periodic_targets(4, 8);
    synthetic::SurrogateSpec spec;
    spec.dynamics.grid = 32;
    spec.dynamics.nu = 1e-3;
    spec.dynamics.dt = 0.005;
    spec.dynamics.seed = 8;
    spec.sigma_c = 0.05;
    spec.seed = 10;
    auto pred = synthetic::make_surrogate(spec);

    RolloutConfig cfg;
    cfg.horizon = 4;
    cfg.mode = Mode::raw;
    cfg.op = opspec::parse("raw");
    RolloutTrace trace = run_rollout(*pred, targets, cfg);

    pred->reset();
    const double step1 = mse((*pred)(targets[0]), targets[1]);
    CHECK(trace.summary.theta_stable_used == doctest::Approx(10.0 * step1).epsilon(1e-12));
}

TEST_CASE("bound recursion basics") {
    SUBCASE("all-zero inputs give a zero bound") {
        BoundTraceInputs in;
        in.l_t = 1.0;
        in.l_f = 0.9;
        in.delta.assign(5, 0.0);
        in.beta.assign(5, 0.0);
        BoundReport rep = check_rollout_bound(std::vector<double>(5, 0.0), in);
        for (double b : rep.bound) CHECK(b == 0.0);
        CHECK(!rep.violated);
    }
    SUBCASE("hand-checked recursion values") {
        BoundTraceInputs in;
        in.l_t = 0.5;
        in.l_f = 1.0;
        in.b0 = 1.0;
        in.delta = {1.0, 1.0};
        in.beta = {0.1, 0.1};
        BoundReport rep = check_rollout_bound({0.0, 0.0}, in);
        CHECK(rep.bound[0] == doctest::Approx(0.5 * 1.0 + 0.5 * 1.0 + 0.1));
        CHECK(rep.bound[1] == doctest::Approx(0.5 * rep.bound[0] + 0.5 + 0.1));
        CHECK(!rep.violated);
    }
    SUBCASE("violations are reported, not thrown") {
        BoundTraceInputs in;
        in.l_t = 1.0;
        in.l_f = 0.5;
        in.delta.assign(3, 0.0);
        in.beta.assign(3, 0.0);
        BoundReport rep = check_rollout_bound({1.0, 1.0, 1.0}, in);
        CHECK(rep.violated);
        for (double m : rep.margin) CHECK(m < 0.0);
    }
    SUBCASE("negative constants are rejected") {
        BoundTraceInputs in;
        in.l_t = -1.0;
        CHECK_THROWS_AS(in.validate(), config_error);
    }
}

TEST_CASE("the bound holds on a linear contraction toy rollout") {
    // x_{t+1} = P F x_t in R^8 with dense-computed constants.
    const int n = 8;
    std::mt19937_64 rng(17);
    std::normal_distribution<double> gauss;

    oracles::Matrix f(n * n);
    for (double& v : f) v = gauss(rng);
    const double fn = oracles::spectral_norm(f, n, n);
    for (double& v : f) v *= 0.8 / fn;  // L_F = 0.8
    const double l_f = oracles::spectral_norm(f, n, n);

    std::vector<double> y(n), x(n);
    for (double& v : y) v = gauss(rng);
    x = y;
    for (double& v : x) v += 0.1 * gauss(rng);

    BoundTraceInputs in;
    in.l_t = 1.0;  // identity repair operator
    in.l_f = l_f;
    {
        std::vector<double> d(n);
        for (int i = 0; i < n; ++i) d[i] = x[i] - y[i];
        in.b0 = oracles::norm2(d);
    }
    std::vector<double> errors;
    for (int t = 0; t < 30; ++t) {
        std::vector<double> fy = oracles::matvec(f, n, n, y);
        std::vector<double> fx = oracles::matvec(f, n, n, x);
        std::vector<double> y_next(n);
        for (int i = 0; i < n; ++i) y_next[i] = fy[i] + 0.01 * gauss(rng);  // drifting target
        std::vector<double> d(n);
        for (int i = 0; i < n; ++i) d[i] = fy[i] - y_next[i];
        in.delta.push_back(oracles::norm2(d));
        in.beta.push_back(0.0);
        x = fx;
        y = y_next;
        for (int i = 0; i < n; ++i) d[i] = x[i] - y[i];
        errors.push_back(oracles::norm2(d));
    }
    BoundReport rep = check_rollout_bound(errors, in);
    CHECK(!rep.violated);
    for (double m : rep.margin) CHECK(m >= -1e-12);
}

TEST_CASE("bound domination") {
    SUBCASE("identical inputs dominate with equality") {
        BoundTraceInputs a;
        a.l_t = 0.9;
        a.l_f = 0.8;
        a.delta.assign(10, 0.3);
        a.beta.assign(10, 0.1);
        CHECK(bound_domination_check(a, a));
    }
    SUBCASE("larger beta strictly dominates") {
        BoundTraceInputs a, b;
        a.l_t = b.l_t = 1.0;
        a.l_f = b.l_f = 0.5;
        a.delta.assign(10, 0.2);
        b.delta = a.delta;
        a.beta.assign(10, 0.0);
        b.beta.assign(10, 0.1);
        CHECK(bound_domination_check(a, b));
    }
    SUBCASE("violated preconditions are rejected") {
        BoundTraceInputs a, b;
        a.l_t = 1.0;
        b.l_t = 0.5;  // a.l_t > b.l_t breaks the premise
        a.l_f = b.l_f = 0.5;
        a.delta.assign(3, 0.1);
        b.delta = a.delta;
        a.beta.assign(3, 0.0);
        b.beta.assign(3, 0.0);
        CHECK_THROWS_AS(bound_domination_check(a, b), config_error);

        BoundTraceInputs c = a;
        c.l_t = 0.5;
        c.delta.assign(3, 0.2);  // different delta
        CHECK_THROWS_AS(bound_domination_check(c, a), config_error);
    }
}

TEST_CASE("steady state bound") {
    CHECK(steady_state_bound(0.9, 1.0, 0.2, 0.1) ==
          doctest::Approx((0.9 * 0.2 + 0.1) / (1.0 - 0.9)));
    CHECK_THROWS_AS(steady_state_bound(1.0, 1.0, 0.1, 0.1), config_error);
}
