#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "i2t/attack.hpp"
#include "i2t/config.hpp"
#include "i2t/dataset.hpp"
#include "i2t/encoders.hpp"
#include "i2t/image.hpp"

namespace i2t {

/// Paired image/text encoders of a joint-embedding scorer.
struct ClipScorer {
    const ImageEncoderAdapter* image_encoder = nullptr;
    const TextEncoderAdapter* text_encoder = nullptr;
};

/// Cosine similarity between the scorer's image embedding and text embedding.
double clip_score(const ImageTensor& image, const std::string& text, const ClipScorer& clip);

/// Per-image pre/post attack scores and captions.
struct EvalRecord {
    std::string sample_id;
    AttackMode mode = AttackMode::Untargeted;
    double epsilon = 0.0;
    std::string clean_caption;
    std::string adv_caption;
    double clip_clean = 0.0;  // eval-path clean image vs reference caption
    double clip_adv = 0.0;    // adversarial image vs the same reference caption
    std::optional<double> clip_adv_gen;  // optional: adversarial image vs its own caption
    double linf = 0.0;
    double l2 = 0.0;

    bool operator==(const EvalRecord&) const = default;
};

struct EvalInputs {
    std::string sample_id;
    AttackMode mode = AttackMode::Untargeted;
    double epsilon = 0.0;
    ImageTensor clean_image;        // original resolution, byte or unit domain
    ImageTensor adversarial_image;  // model resolution, byte or unit domain
    std::string reference_caption;  // ground-truth caption of the clean image
    bool extra_generated_column = false;
};

/// Scores one attack outcome. Both images are taken through the same
/// deployment path the saved artifacts see: model resolution, quantized to
/// 8-bit, so a PNG round trip leaves the record unchanged.
EvalRecord evaluate_pair(const EvalInputs& in, const CaptionPipelineAdapter& captioner,
                         const ClipScorer& clip);

/// Table-shaped aggregate over one (mode, epsilon) group.
struct SweepRow {
    AttackMode mode = AttackMode::Untargeted;
    double epsilon = 0.0;
    double mean_no_attack = 0.0;
    double std_no_attack = 0.0;
    double mean_attack = 0.0;
    double std_attack = 0.0;
    int n = 0;
    bool best = false;  // lowest attack mean within its mode

    bool operator==(const SweepRow&) const = default;
};

struct SweepReport {
    std::vector<SweepRow> rows;  // sorted by mode, then epsilon ascending

    bool operator==(const SweepReport&) const = default;
};

/// Population mean/std per (mode, epsilon) group. Throws EmptyInput on an
/// empty record list.
SweepReport aggregate_sweep(const std::vector<EvalRecord>& records);

/// Records CSV (RFC 4180, UTF-8, header row). Column order:
/// sample_id, mode, epsilon, clip_clean, clip_adv, linf, l2,
/// clean_caption, adv_caption [, clip_adv_gen].
std::string records_to_csv(const std::vector<EvalRecord>& records);
std::vector<EvalRecord> records_from_csv(const std::string& csv);
void write_records_csv(const std::vector<EvalRecord>& records, const std::filesystem::path& path);
std::vector<EvalRecord> read_records_csv(const std::filesystem::path& path);

/// Report renderers. All are deterministic functions of the report.
nlohmann::json report_to_json(const SweepReport& report);
SweepReport report_from_json(const nlohmann::json& j);
std::string render_report_table(const SweepReport& report);
std::string render_report_svg(const SweepReport& report);

}  // namespace i2t
