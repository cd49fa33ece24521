#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "i2t/config.hpp"
#include "i2t/encoders.hpp"
#include "i2t/image.hpp"
#include "i2t/objectives.hpp"

namespace i2t {

enum class StopReason { MaxSteps, LrFloor, NanAbort };

std::string to_string(StopReason r);
StopReason stop_reason_from_string(const std::string& s);

/// Adaptive-moment accumulator state, shaped like the optimization variable.
struct OptimizerState {
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    std::int64_t step_count = 0;
    double learning_rate = 0.0;
};

OptimizerState make_optimizer_state(std::size_t n, double learning_rate);

/// One bias-corrected adaptive-moment step. Returns the parameter update
/// (to be added to the variable); the moment buffers and step counter are
/// updated in place. Throws NonFiniteGradient on non-finite input.
std::vector<double> adam_step(OptimizerState& state, std::span<const double> grad,
                              double beta1, double beta2, double eps_num = 1e-8);

/// Plateau learning-rate controller: multiply the rate by `factor` after
/// `patience` consecutive steps without relative improvement.
struct SchedulerState {
    double best_loss = 0.0;  // +inf until the first observation
    int steps_since_improvement = 0;
    int patience = 30;
    double factor = 0.1;
    double rel_threshold = 1e-4;
};

SchedulerState make_scheduler_state(int patience, double factor, double rel_threshold = 1e-4);

/// Observes current_loss and returns the learning rate to use next.
/// Improvement means current_loss < best_loss - rel_threshold * |best_loss|.
double scheduler_step(SchedulerState& state, double current_loss, double lr);

/// Clamp every entry of delta to [-epsilon, +epsilon].
void project_linf(std::span<double> delta, double epsilon);
std::vector<double> project_linf(std::span<const double> delta, double epsilon);

/// Clamp a unit-domain image to [0, 1].
ImageTensor clamp_domain(const ImageTensor& img);

struct StepTrace {
    int step = 0;  // 1-based
    double loss = 0.0;
    double cs_term = 0.0;
    double sim_term = 0.0;
    double lr = 0.0;
    double linf = 0.0;
};

/// Called once per optimization step with the trace record and the current
/// feasible iterate.
using StepCallback = std::function<void(const StepTrace&, const ImageTensor& adversarial)>;

struct AttackResult {
    ImageTensor adversarial_image;
    std::vector<double> loss_trace;   // one entry per executed step
    double cs_final = 0.0;            // cosine similarity to the reference embedding
    double linf_actual = 0.0;
    double l2_actual = 0.0;
    int steps_run = 0;
    StopReason stop_reason = StopReason::MaxSteps;
};

/// Projected-gradient attack on the perturbation: adaptive-moment descent on
/// the Eq.-style composite objective, L-inf projection then pixel-domain clamp
/// after every step, plateau learning-rate decay, seeded random start inside
/// the epsilon ball. Deterministic given cfg.seed.
AttackResult run_attack(const ImageTensor& clean, const ObjectiveSpec& spec,
                        const AttackConfig& cfg, const ImageEncoderAdapter& encoder,
                        const StepCallback& on_step = {});

/// Quantize an adversarial unit image to the byte grid without leaving the
/// epsilon ball around the byte-quantized clean image, so the saved PNG still
/// satisfies the L-inf budget after the 8-bit round trip.
ImageTensor quantize_feasible(const ImageTensor& clean_unit, const ImageTensor& adv_unit,
                              double epsilon);

/// JSONL step-trace writer for post-hoc plotting: one record per step with
/// fields step, loss, cs_term, sim_term, lr, linf.
class TraceWriter {
public:
    explicit TraceWriter(const std::filesystem::path& path);
    ~TraceWriter();
    TraceWriter(const TraceWriter&) = delete;
    TraceWriter& operator=(const TraceWriter&) = delete;

    void write(const StepTrace& t);
    StepCallback callback();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace i2t
