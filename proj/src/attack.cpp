#include "i2t/attack.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "i2t/errors.hpp"
#include "i2t/rng.hpp"

namespace i2t {

std::string to_string(StopReason r) {
    switch (r) {
        case StopReason::MaxSteps: return "max_steps";
        case StopReason::LrFloor: return "lr_floor";
        case StopReason::NanAbort: return "nan_abort";
    }
    return "unknown";
}

StopReason stop_reason_from_string(const std::string& s) {
    if (s == "max_steps") return StopReason::MaxSteps;
    if (s == "lr_floor") return StopReason::LrFloor;
    if (s == "nan_abort") return StopReason::NanAbort;
    throw Error(ErrorCode::InvalidArgument, "unknown stop reason '" + s + "'");
}

OptimizerState make_optimizer_state(std::size_t n, double learning_rate) {
    OptimizerState s;
    s.first_moment.assign(n, 0.0);
    s.second_moment.assign(n, 0.0);
    s.step_count = 0;
    s.learning_rate = learning_rate;
    return s;
}

std::vector<double> adam_step(OptimizerState& state, std::span<const double> grad, double beta1,
                              double beta2, double eps_num) {
    if (grad.size() != state.first_moment.size()) {
        throw Error(ErrorCode::ShapeMismatch, "gradient size does not match optimizer state");
    }
    for (double g : grad) {
        if (!std::isfinite(g)) {
            throw Error(ErrorCode::NonFiniteGradient, "non-finite gradient entry in adam_step");
        }
    }
    state.step_count += 1;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step_count));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step_count));
    std::vector<double> update(grad.size());
    for (std::size_t i = 0; i < grad.size(); ++i) {
        const double g = grad[i];
        state.first_moment[i] = beta1 * state.first_moment[i] + (1.0 - beta1) * g;
        state.second_moment[i] = beta2 * state.second_moment[i] + (1.0 - beta2) * g * g;
        const double m_hat = state.first_moment[i] / bc1;
        const double v_hat = state.second_moment[i] / bc2;
        update[i] = -state.learning_rate * m_hat / (std::sqrt(v_hat) + eps_num);
    }
    return update;
}

SchedulerState make_scheduler_state(int patience, double factor, double rel_threshold) {
    SchedulerState s;
    s.best_loss = std::numeric_limits<double>::infinity();
    s.steps_since_improvement = 0;
    s.patience = patience;
    s.factor = factor;
    s.rel_threshold = rel_threshold;
    return s;
}

double scheduler_step(SchedulerState& state, double current_loss, double lr) {
    const bool improved =
        std::isinf(state.best_loss)
            ? current_loss < state.best_loss
            : current_loss < state.best_loss - state.rel_threshold * std::abs(state.best_loss);
    if (improved) {
        state.best_loss = current_loss;
        state.steps_since_improvement = 0;
        return lr;
    }
    state.steps_since_improvement += 1;
    if (state.steps_since_improvement >= state.patience) {
        state.steps_since_improvement = 0;
        return lr * state.factor;
    }
    return lr;
}

void project_linf(std::span<double> delta, double epsilon) {
    if (!(epsilon > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
    }
    for (double& d : delta) d = std::clamp(d, -epsilon, epsilon);
}

std::vector<double> project_linf(std::span<const double> delta, double epsilon) {
    std::vector<double> out(delta.begin(), delta.end());
    project_linf(std::span<double>(out), epsilon);
    return out;
}

ImageTensor clamp_domain(const ImageTensor& img) {
    if (img.domain() != PixelDomain::Unit) {
        throw Error(ErrorCode::DomainMismatch, "clamp_domain expects a unit-domain image");
    }
    std::vector<double> out(img.values().begin(), img.values().end());
    for (double& v : out) v = std::clamp(v, 0.0, 1.0);
    return {img.height(), img.width(), PixelDomain::Unit, std::move(out)};
}

namespace {

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

AttackResult run_attack(const ImageTensor& clean, const ObjectiveSpec& spec,
                        const AttackConfig& cfg, const ImageEncoderAdapter& encoder,
                        const StepCallback& on_step) {
    const auto violations = validate_config(cfg);
    if (!violations.empty()) {
        throw Error(ErrorCode::InvalidArgument, "invalid attack config: " + violations[0].code);
    }
    if (spec.mode != cfg.mode) {
        throw Error(ErrorCode::InvalidArgument, "objective mode does not match config mode");
    }
    const auto [h, w] = encoder.input_size();
    if (clean.domain() != PixelDomain::Unit || clean.height() != h || clean.width() != w) {
        throw Error(ErrorCode::InvalidArgument,
                    "clean image must be unit-domain at the encoder resolution");
    }
    if (!clean.same_shape(spec.clean_image)) {
        throw Error(ErrorCode::ShapeMismatch, "spec.clean_image does not match the attacked image");
    }

    const std::size_t n = clean.size();
    const auto cvals = clean.values();

    // Random start inside the epsilon ball; a zero start is a stationary point
    // of the cosine objective in the untargeted case (the gradient of CS at
    // identical embeddings vanishes identically), so the optimizer would never
    // leave it.
    std::vector<double> delta(n);
    SeededRng rng(static_cast<std::uint64_t>(cfg.seed));
    for (std::size_t i = 0; i < n; ++i) {
        double d = rng.uniform(-cfg.epsilon, cfg.epsilon);
        delta[i] = std::clamp(d, -cvals[i], 1.0 - cvals[i]);  // keep clean + delta in [0, 1]
    }

    OptimizerState opt = make_optimizer_state(n, cfg.learning_rate);
    SchedulerState sched = make_scheduler_state(cfg.scheduler_patience, cfg.scheduler_factor);

    auto make_adversarial = [&](const std::vector<double>& d) {
        std::vector<double> vals(n);
        for (std::size_t i = 0; i < n; ++i) vals[i] = std::clamp(cvals[i] + d[i], 0.0, 1.0);
        return ImageTensor(clean.height(), clean.width(), PixelDomain::Unit, std::move(vals));
    };

    AttackResult result{ImageTensor(clean.height(), clean.width(), PixelDomain::Unit), {}, 0.0, 0.0,
                        0.0, 0, StopReason::MaxSteps};
    result.loss_trace.reserve(static_cast<std::size_t>(cfg.max_steps));

    for (int step = 1; step <= cfg.max_steps; ++step) {
        const ImageTensor adversarial = make_adversarial(delta);
        TotalGrad tg;
        bool finite = true;
        try {
            tg = total_loss_grad(spec, adversarial, encoder);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ZeroNorm || e.code() == ErrorCode::NonFiniteGradient) {
                finite = false;
            } else {
                throw;
            }
        }
        if (finite && !std::isfinite(tg.terms.total)) finite = false;
        if (finite) {
            for (double g : tg.grad) {
                if (!std::isfinite(g)) {
                    finite = false;
                    break;
                }
            }
        }
        if (!finite) {
            result.stop_reason = StopReason::NanAbort;
            break;
        }

        result.loss_trace.push_back(tg.terms.total);
        result.steps_run = step;
        if (on_step) {
            StepTrace t;
            t.step = step;
            t.loss = tg.terms.total;
            t.cs_term = tg.terms.cs_term;
            t.sim_term = tg.terms.sim_term;
            t.lr = opt.learning_rate;
            t.linf = max_abs(delta);
            on_step(t, adversarial);
        }

        const std::vector<double> update = adam_step(opt, tg.grad, cfg.beta1, cfg.beta2);
        for (std::size_t i = 0; i < n; ++i) delta[i] += update[i];
        project_linf(std::span<double>(delta), cfg.epsilon);
        for (std::size_t i = 0; i < n; ++i) {
            delta[i] = std::clamp(delta[i], -cvals[i], 1.0 - cvals[i]);
        }

        opt.learning_rate = scheduler_step(sched, tg.terms.total, opt.learning_rate);
        if (opt.learning_rate < cfg.min_learning_rate) {
            result.stop_reason = StopReason::LrFloor;
            break;
        }
    }

    result.adversarial_image = make_adversarial(delta);
    const Embedding final_embedding = encoder.encode(result.adversarial_image);
    result.cs_final = cosine_similarity(spec.reference_embedding.values, final_embedding.values);
    std::vector<double> final_delta(n);
    const auto avals = result.adversarial_image.values();
    for (std::size_t i = 0; i < n; ++i) final_delta[i] = avals[i] - cvals[i];
    result.linf_actual = max_abs(final_delta);
    result.l2_actual = norm2(final_delta);
    return result;
}

ImageTensor quantize_feasible(const ImageTensor& clean_unit, const ImageTensor& adv_unit,
                              double epsilon) {
    if (!clean_unit.same_shape(adv_unit) || clean_unit.domain() != PixelDomain::Unit ||
        adv_unit.domain() != PixelDomain::Unit) {
        throw Error(ErrorCode::ShapeMismatch, "quantize_feasible expects matching unit images");
    }
    const double radius = std::floor(epsilon * 255.0 + 1e-9);
    std::vector<double> out(adv_unit.size());
    auto c = clean_unit.values();
    auto a = adv_unit.values();
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double clean_byte = std::clamp(std::round(c[i] * 255.0), 0.0, 255.0);
        double b = std::round(a[i] * 255.0);
        b = std::clamp(b, clean_byte - radius, clean_byte + radius);
        out[i] = std::clamp(b, 0.0, 255.0);
    }
    return {adv_unit.height(), adv_unit.width(), PixelDomain::Byte, std::move(out)};
}

struct TraceWriter::Impl {
    std::ofstream out;
};

TraceWriter::TraceWriter(const std::filesystem::path& path) : impl_(std::make_unique<Impl>()) {
    impl_->out.open(path);
    if (!impl_->out) throw Error(ErrorCode::IoError, "cannot write trace " + path.string());
}

TraceWriter::~TraceWriter() = default;

void TraceWriter::write(const StepTrace& t) {
    nlohmann::json j{{"step", t.step}, {"loss", t.loss},  {"cs_term", t.cs_term},
                     {"sim_term", t.sim_term}, {"lr", t.lr}, {"linf", t.linf}};
    impl_->out << j.dump() << "\n";
}

StepCallback TraceWriter::callback() {
    return [this](const StepTrace& t, const ImageTensor&) { write(t); };
}

}  // namespace i2t
