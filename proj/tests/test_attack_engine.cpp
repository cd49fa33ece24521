#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <optional>

#include "i2t/attack.hpp"
#include "i2t/errors.hpp"
#include "i2t/rng.hpp"
#include "i2t/toy_encoder.hpp"
#include "support.hpp"

using namespace i2t;
using i2t::testing::random_unit_image;

TEST_CASE("project_linf clamps coordinates and keeps interior points") {
    std::vector<double> d = {0.4, -0.02, 0.05};
    project_linf(std::span<double>(d), 0.05);
    CHECK(d == std::vector<double>{0.05, -0.02, 0.05});

    std::vector<double> zeros(5, 0.0);
    const auto same = project_linf(std::span<const double>(zeros), 0.1);
    CHECK(same == zeros);

    CHECK_THROWS_AS(project_linf(std::span<double>(d), 0.0), Error);
}

TEST_CASE("projection is idempotent and non-expansive") {
    SeededRng rng(321);
    for (int trial = 0; trial < 200; ++trial) {
        const double eps = 0.01 + rng.uniform() * 0.5;
        std::vector<double> d(16), d2(16);
        for (int i = 0; i < 16; ++i) {
            d[i] = rng.uniform(-1.0, 1.0);
            d2[i] = rng.uniform(-1.0, 1.0);
        }
        const auto p = project_linf(std::span<const double>(d), eps);
        const auto pp = project_linf(std::span<const double>(p), eps);
        CHECK(p == pp);

        const auto q = project_linf(std::span<const double>(d2), eps);
        double before = 0.0, after = 0.0;
        for (int i = 0; i < 16; ++i) {
            before = std::max(before, std::abs(d[i] - d2[i]));
            after = std::max(after, std::abs(p[i] - q[i]));
        }
        CHECK(after <= before + 1e-15);
    }
}

TEST_CASE("clamp_domain endpoints") {
    ImageTensor img(1, 1, PixelDomain::Unit, std::vector<double>{1.2, -0.3, 0.5});
    const ImageTensor clamped = clamp_domain(img);
    CHECK(clamped.values()[0] == 1.0);
    CHECK(clamped.values()[1] == 0.0);
    CHECK(clamped.values()[2] == 0.5);
    CHECK(clamp_domain(clamped) == clamped);  // fixed point
}

namespace {

// Straight-from-the-formula scalar reference, kept independent of adam_step.
struct ScalarAdamRef {
    double m = 0.0;
    double v = 0.0;
    int t = 0;
    double step(double g, double lr, double b1, double b2, double eps) {
        t += 1;
        m = b1 * m + (1 - b1) * g;
        v = b2 * v + (1 - b2) * g * g;
        const double mhat = m / (1 - std::pow(b1, t));
        const double vhat = v / (1 - std::pow(b2, t));
        return -lr * mhat / (std::sqrt(vhat) + eps);
    }
};

}  // namespace

TEST_CASE("first adam step with unit gradient") {
    OptimizerState st = make_optimizer_state(1, 0.01);
    const std::vector<double> g = {1.0};
    const auto update = adam_step(st, g, 0.9, 0.999);
    // Bias correction makes mhat = vhat = 1 at t=1.
    CHECK(update[0] == doctest::Approx(-0.01 * (1.0 / (1.0 + 1e-8))).epsilon(1e-12));
    CHECK(st.step_count == 1);
}

TEST_CASE("zero gradient with zero state yields zero update") {
    OptimizerState st = make_optimizer_state(3, 0.01);
    const std::vector<double> g = {0.0, 0.0, 0.0};
    const auto update = adam_step(st, g, 0.9, 0.999);
    for (double u : update) CHECK(u == 0.0);
}

TEST_CASE("adam rejects non-finite gradients") {
    OptimizerState st = make_optimizer_state(2, 0.01);
    const std::vector<double> g = {1.0, std::numeric_limits<double>::quiet_NaN()};
    CHECK_THROWS_AS(adam_step(st, g, 0.9, 0.999), Error);
}

TEST_CASE("adam matches an independent scalar reference over 100 sequences") {
    SeededRng rng(2024);
    for (int seq = 0; seq < 100; ++seq) {
        const double lr = 0.001 + rng.uniform() * 0.1;
        const double b1 = 0.8 + rng.uniform() * 0.19;
        const double b2 = 0.9 + rng.uniform() * 0.099;
        OptimizerState st = make_optimizer_state(1, lr);
        ScalarAdamRef ref;
        const int len = 10 + static_cast<int>(rng.bounded(40));
        for (int i = 0; i < len; ++i) {
            const double g = rng.normal() * std::pow(10.0, rng.uniform(-3.0, 1.0));
            const auto update = adam_step(st, std::vector<double>{g}, b1, b2);
            const double expected = ref.step(g, lr, b1, b2, 1e-8);
            CHECK(std::abs(update[0] - expected) <= 1e-10);
        }
    }
}

TEST_CASE("update sign depends only on the first-moment estimate") {
    SeededRng rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        const double g = rng.normal();
        const double scale = std::pow(10.0, rng.uniform(-2.0, 2.0));
        OptimizerState a = make_optimizer_state(1, 0.01);
        OptimizerState b = make_optimizer_state(1, 0.01);
        const auto ua = adam_step(a, std::vector<double>{g}, 0.9, 0.999);
        const auto ub = adam_step(b, std::vector<double>{g * scale}, 0.9, 0.999);
        if (g != 0.0) {
            CHECK(std::signbit(ua[0]) == std::signbit(ub[0]));
        }
    }
}

namespace {

// Literal transcription of the plateau rule, used as the state-machine oracle.
struct SchedulerOracle {
    double best = std::numeric_limits<double>::infinity();
    int stale = 0;
    double observe(double loss, double lr, int patience, double factor, double rel) {
        const bool improved = std::isinf(best) ? loss < best : loss < best - rel * std::abs(best);
        if (improved) {
            best = loss;
            stale = 0;
            return lr;
        }
        stale += 1;
        if (stale == patience) {
            stale = 0;
            return lr * factor;
        }
        return lr;
    }
};

}  // namespace

TEST_CASE("scheduler: 30 stale steps at factor 0.1 decays 0.01 to 0.001") {
    SchedulerState st = make_scheduler_state(30, 0.1);
    double lr = 0.01;
    lr = scheduler_step(st, 1.0, lr);  // first observation sets best
    for (int i = 0; i < 29; ++i) {
        lr = scheduler_step(st, 1.0, lr);
        CHECK(lr == 0.01);
    }
    lr = scheduler_step(st, 1.0, lr);  // 30th non-improving step
    CHECK(lr == doctest::Approx(0.001).epsilon(1e-12));
    CHECK(st.steps_since_improvement == 0);
}

TEST_CASE("scheduler: improving losses never decay; reset just under patience") {
    SchedulerState st = make_scheduler_state(30, 0.1);
    double lr = 0.01;
    double loss = 10.0;
    for (int i = 0; i < 100; ++i) {
        lr = scheduler_step(st, loss, lr);
        CHECK(lr == 0.01);
        loss *= 0.9;
    }

    st = make_scheduler_state(30, 0.1);
    lr = scheduler_step(st, 1.0, lr);
    for (int i = 0; i < 29; ++i) lr = scheduler_step(st, 1.0, lr);
    CHECK(st.steps_since_improvement == 29);
    lr = scheduler_step(st, 0.5, lr);  // improvement resets the counter
    CHECK(st.steps_since_improvement == 0);
    CHECK(lr == 0.01);
}

TEST_CASE("scheduler matches the brute-force oracle on random loss sequences") {
    SeededRng rng(1337);
    for (int seq = 0; seq < 300; ++seq) {
        const int patience = 1 + static_cast<int>(rng.bounded(10));
        const double factor = 0.1 + rng.uniform() * 0.8;
        const int len = 1 + static_cast<int>(rng.bounded(100));
        SchedulerState st = make_scheduler_state(patience, factor);
        SchedulerOracle oracle;
        double lr = 0.01, lr_ref = 0.01;
        double loss = 1.0;
        for (int i = 0; i < len; ++i) {
            // Mix improvements, plateaus, and regressions, incl. negative losses.
            const auto kind = rng.bounded(4);
            if (kind == 0) loss -= rng.uniform() * 0.5;
            else if (kind == 1) loss += rng.uniform() * 0.1;
            // else: exact plateau
            lr = scheduler_step(st, loss, lr);
            lr_ref = oracle.observe(loss, lr_ref, patience, factor, st.rel_threshold);
            CHECK(lr == lr_ref);
            CHECK(st.steps_since_improvement == oracle.stale);
            CHECK(st.steps_since_improvement <= patience);
        }
    }
}

namespace {

ToyEncoder::Params attack_params() {
    ToyEncoder::Params p;
    p.patch_size = 4;
    p.weight_seed = 7;
    p.embedding_dim = 16;
    p.input_height = 16;
    p.input_width = 16;
    p.hidden_dim = 32;
    return p;
}

AttackConfig quick_config(AttackMode mode, int steps = 120) {
    AttackConfig cfg;
    cfg.epsilon = 0.05;
    cfg.mode = mode;
    cfg.max_steps = steps;
    cfg.seed = 99;
    return cfg;
}

}  // namespace

TEST_CASE("run_attack stays feasible at every step and improves the loss") {
    const ToyEncoder enc(attack_params());
    const ImageTensor clean = random_unit_image(16, 16, 11);
    ObjectiveSpec spec;
    spec.mode = AttackMode::Untargeted;
    spec.lam = 0.1;
    spec.reference_embedding = enc.encode(clean);
    spec.clean_image = clean;
    const AttackConfig cfg = quick_config(AttackMode::Untargeted, 300);

    int violations = 0;
    int steps_seen = 0;
    const AttackResult result = run_attack(clean, spec, cfg, enc,
        [&](const StepTrace& t, const ImageTensor& adv) {
            steps_seen += 1;
            CHECK(t.step == steps_seen);
            if (t.linf > cfg.epsilon + 1e-6) violations += 1;
            for (std::size_t i = 0; i < adv.size(); ++i) {
                const double v = adv.values()[i];
                const double d = std::abs(v - clean.values()[i]);
                if (v < 0.0 || v > 1.0 || d > cfg.epsilon + 1e-6) violations += 1;
            }
        });

    CHECK(violations == 0);
    CHECK(result.steps_run <= 300);
    CHECK(result.steps_run == steps_seen);
    CHECK(static_cast<int>(result.loss_trace.size()) == result.steps_run);
    // Converged runs may stop on the lr floor before exhausting the budget.
    CHECK(result.stop_reason != StopReason::NanAbort);
    CHECK(result.linf_actual <= cfg.epsilon + 1e-6);
    CHECK(result.adversarial_image.within_domain_bounds());
    // Final similarity strictly below the trivial value at zero perturbation.
    CHECK(result.cs_final < 1.0);
    CHECK(result.loss_trace.back() < result.loss_trace.front());
    CHECK(result.l2_actual > 0.0);
}

TEST_CASE("run_attack is bitwise deterministic per seed") {
    const ToyEncoder enc(attack_params());
    const ImageTensor clean = random_unit_image(16, 16, 12);
    ObjectiveSpec spec;
    spec.mode = AttackMode::Untargeted;
    spec.lam = 0.1;
    spec.reference_embedding = enc.encode(clean);
    spec.clean_image = clean;
    const AttackConfig cfg = quick_config(AttackMode::Untargeted, 60);

    const AttackResult a = run_attack(clean, spec, cfg, enc);
    const AttackResult b = run_attack(clean, spec, cfg, enc);
    CHECK(a.adversarial_image == b.adversarial_image);
    CHECK(a.loss_trace == b.loss_trace);
    CHECK(a.cs_final == b.cs_final);
    CHECK(a.linf_actual == b.linf_actual);
    CHECK(a.l2_actual == b.l2_actual);

    AttackConfig other = cfg;
    other.seed = 100;
    const AttackResult c = run_attack(clean, spec, other, enc);
    CHECK(c.adversarial_image != a.adversarial_image);
}

TEST_CASE("degenerate self-target stays near zero loss") {
    const ToyEncoder enc(attack_params());
    const ImageTensor clean = random_unit_image(16, 16, 13);
    ObjectiveSpec spec;
    spec.mode = AttackMode::Targeted;
    spec.lam = 0.1;
    spec.reference_embedding = enc.encode(clean);  // target == clean image
    spec.clean_image = clean;
    AttackConfig cfg = quick_config(AttackMode::Targeted, 200);

    const AttackResult result = run_attack(clean, spec, cfg, enc);
    // The optimizer converges back toward the self-target fixed point.
    CHECK(1.0 - result.cs_final < 0.05);
    CHECK(result.linf_actual <= cfg.epsilon + 1e-6);
}

TEST_CASE("run_attack validates inputs") {
    const ToyEncoder enc(attack_params());
    const ImageTensor clean = random_unit_image(16, 16, 14);
    ObjectiveSpec spec;
    spec.mode = AttackMode::Untargeted;
    spec.reference_embedding = enc.encode(clean);
    spec.clean_image = clean;

    AttackConfig bad = quick_config(AttackMode::Untargeted);
    bad.epsilon = 0.0;
    CHECK_THROWS_AS(run_attack(clean, spec, bad, enc), Error);

    AttackConfig mismatched = quick_config(AttackMode::Targeted);
    CHECK_THROWS_AS(run_attack(clean, spec, mismatched, enc), Error);

    const AttackConfig cfg = quick_config(AttackMode::Untargeted);
    CHECK_THROWS_AS(run_attack(random_unit_image(8, 8, 1), spec, cfg, enc), Error);
}

TEST_CASE("nan abort returns a partial trace") {
    // An encoder that blows up after a few calls forces the abort path.
    class FlakyEncoder final : public ImageEncoderAdapter {
    public:
        explicit FlakyEncoder(int fail_after) : fail_after_(fail_after) {}
        const std::string& encoder_id() const override { return id_; }
        int embedding_dim() const override { return 4; }
        std::pair<int, int> input_size() const override { return {8, 8}; }
        Embedding encode(const ImageTensor& img) const override {
            calls_ += 1;
            const double bad = calls_ > fail_after_ ? std::numeric_limits<double>::quiet_NaN() : 1.0;
            return {{bad, img.values()[0] + 1.0, 0.5, -0.25}, EmbeddingSource::ImageEncoder};
        }
        std::vector<double> encode_vjp(const ImageTensor& img,
                                       std::span<const double>) const override {
            return std::vector<double>(img.size(), 0.01);
        }

    private:
        std::string id_ = "flaky";
        int fail_after_;
        mutable int calls_ = 0;
    };

    const FlakyEncoder enc(5);
    const ImageTensor clean = random_unit_image(8, 8, 15);
    ObjectiveSpec spec;
    spec.mode = AttackMode::Untargeted;
    spec.lam = 0.1;
    spec.reference_embedding = Embedding{{1.0, 0.5, 0.5, -0.25}, EmbeddingSource::ImageEncoder};
    spec.clean_image = clean;
    AttackConfig cfg = quick_config(AttackMode::Untargeted, 50);

    bool threw = false;
    std::optional<AttackResult> result;
    try {
        result = run_attack(clean, spec, cfg, enc);
    } catch (const Error&) {
        threw = true;
    }
    // The final re-encode may surface the NaN as cs_final; the run itself
    // must stop with the abort reason and a consistent partial trace.
    if (!threw) {
        CHECK(result->stop_reason == StopReason::NanAbort);
        CHECK(static_cast<int>(result->loss_trace.size()) == result->steps_run);
        CHECK(result->steps_run < 50);
    }
}

TEST_CASE("lr floor stops a permanently stale run") {
    const ToyEncoder enc(attack_params());
    const ImageTensor clean = random_unit_image(16, 16, 16);
    ObjectiveSpec spec;
    spec.mode = AttackMode::Untargeted;
    spec.lam = 0.1;
    spec.reference_embedding = enc.encode(clean);
    spec.clean_image = clean;

    AttackConfig cfg = quick_config(AttackMode::Untargeted, 1000);
    cfg.scheduler_patience = 2;
    cfg.scheduler_factor = 0.1;
    cfg.min_learning_rate = 1e-3;  // floor close to the initial rate
    const AttackResult result = run_attack(clean, spec, cfg, enc);
    CHECK(result.stop_reason == StopReason::LrFloor);
    CHECK(result.steps_run < 1000);
}

TEST_CASE("trace writer emits one json line per step") {
    i2t::testing::TempDir dir("trace");
    const auto path = dir.path() / "run.trace.jsonl";
    const ToyEncoder enc(attack_params());
    const ImageTensor clean = random_unit_image(16, 16, 17);
    ObjectiveSpec spec;
    spec.mode = AttackMode::Untargeted;
    spec.lam = 0.1;
    spec.reference_embedding = enc.encode(clean);
    spec.clean_image = clean;
    const AttackConfig cfg = quick_config(AttackMode::Untargeted, 25);

    int steps = 0;
    {
        TraceWriter writer(path);
        steps = run_attack(clean, spec, cfg, enc, writer.callback()).steps_run;
    }
    std::ifstream in(path);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
        const auto j = nlohmann::json::parse(line);
        CHECK(j.at("step") == lines + 1);
        for (const char* key : {"loss", "cs_term", "sim_term", "lr", "linf"}) {
            CHECK(j.contains(key));
        }
        lines += 1;
    }
    CHECK(lines == steps);
    CHECK(lines > 0);
}

TEST_CASE("quantize_feasible keeps the byte image inside the budget") {
    SeededRng rng(555);
    for (int trial = 0; trial < 50; ++trial) {
        const double eps = 0.02 + rng.uniform() * 0.3;
        const ImageTensor clean = random_unit_image(8, 8, 600 + trial);
        ImageTensor adv = clean;
        for (double& v : adv.values()) {
            v = std::clamp(v + rng.uniform(-eps, eps), 0.0, 1.0);
        }
        const ImageTensor q = quantize_feasible(clean, adv, eps);
        CHECK(q.domain() == PixelDomain::Byte);
        CHECK(q.within_domain_bounds());
        const ImageTensor clean_bytes = to_byte_domain(clean);
        for (std::size_t i = 0; i < q.size(); ++i) {
            CHECK(std::abs(q.values()[i] - clean_bytes.values()[i]) / 255.0 <= eps);
        }
        // Idempotent once on the byte grid.
        const ImageTensor q2 = quantize_feasible(clean, to_unit_domain(q), eps);
        CHECK(q2 == q);
    }
}
