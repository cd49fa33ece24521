#include "i2t/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "i2t/errors.hpp"
#include "i2t/objectives.hpp"

namespace i2t {

double clip_score(const ImageTensor& image, const std::string& text, const ClipScorer& clip) {
    if (!clip.image_encoder || !clip.text_encoder) {
        throw Error(ErrorCode::InvalidArgument, "clip scorer is missing an encoder");
    }
    if (text.empty()) {
        throw Error(ErrorCode::InvalidArgument, "clip_score requires nonempty text");
    }
    const ImageTensor unit = image.domain() == PixelDomain::Byte ? to_unit_domain(image) : image;
    const Embedding ie = encode_image(*clip.image_encoder, unit);
    const Embedding te = encode_text(*clip.text_encoder, text);
    return cosine_similarity(ie, te);
}

EvalRecord evaluate_pair(const EvalInputs& in, const CaptionPipelineAdapter& captioner,
                         const ClipScorer& clip) {
    if (in.reference_caption.empty()) {
        throw Error(ErrorCode::InvalidArgument, "evaluate_pair requires a reference caption");
    }
    const ImageTensor clean_unit =
        in.clean_image.domain() == PixelDomain::Byte ? to_unit_domain(in.clean_image) : in.clean_image;
    const ImageTensor adv_unit = in.adversarial_image.domain() == PixelDomain::Byte
                                     ? to_unit_domain(in.adversarial_image)
                                     : in.adversarial_image;

    // Both sides go through the deployment path the saved artifacts see:
    // model resolution, 8-bit quantized. A PNG round trip is then a no-op.
    const ImageTensor clean_resized =
        resize_bilinear(clean_unit, adv_unit.height(), adv_unit.width());
    const ImageTensor clean_eval = to_unit_domain(to_byte_domain(clean_resized));
    const ImageTensor adv_eval =
        to_unit_domain(quantize_feasible(clean_resized, adv_unit, in.epsilon));

    EvalRecord rec;
    rec.sample_id = in.sample_id;
    rec.mode = in.mode;
    rec.epsilon = in.epsilon;
    rec.clean_caption = caption(captioner, clean_eval);
    rec.adv_caption = caption(captioner, adv_eval);
    rec.clip_clean = clip_score(clean_eval, in.reference_caption, clip);
    rec.clip_adv = clip_score(adv_eval, in.reference_caption, clip);
    if (in.extra_generated_column) {
        rec.clip_adv_gen = clip_score(adv_eval, rec.adv_caption, clip);
    }

    double linf = 0.0;
    double l2 = 0.0;
    auto c = clean_eval.values();
    auto a = adv_eval.values();
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double d = std::abs(c[i] - a[i]);
        linf = std::max(linf, d);
        l2 += d * d;
    }
    rec.linf = linf;
    rec.l2 = std::sqrt(l2);
    return rec;
}

SweepReport aggregate_sweep(const std::vector<EvalRecord>& records) {
    if (records.empty()) {
        throw Error(ErrorCode::EmptyInput, "aggregate_sweep needs at least one record");
    }
    std::map<std::pair<int, double>, std::vector<const EvalRecord*>> groups;
    for (const EvalRecord& r : records) {
        groups[{static_cast<int>(r.mode), r.epsilon}].push_back(&r);
    }

    auto mean_of = [](const std::vector<const EvalRecord*>& rs, auto field) {
        double s = 0.0;
        for (const auto* r : rs) s += field(*r);
        return s / static_cast<double>(rs.size());
    };
    auto std_of = [](const std::vector<const EvalRecord*>& rs, auto field, double mean) {
        double s = 0.0;
        for (const auto* r : rs) {
            const double d = field(*r) - mean;
            s += d * d;
        }
        return std::sqrt(s / static_cast<double>(rs.size()));  // population convention
    };

    SweepReport report;
    for (const auto& [key, rs] : groups) {
        SweepRow row;
        row.mode = static_cast<AttackMode>(key.first);
        row.epsilon = key.second;
        auto clean = [](const EvalRecord& r) { return r.clip_clean; };
        auto adv = [](const EvalRecord& r) { return r.clip_adv; };
        row.mean_no_attack = mean_of(rs, clean);
        row.std_no_attack = std_of(rs, clean, row.mean_no_attack);
        row.mean_attack = mean_of(rs, adv);
        row.std_attack = std_of(rs, adv, row.mean_attack);
        row.n = static_cast<int>(rs.size());
        report.rows.push_back(row);
    }
    // std::map ordering already gives mode-major, epsilon-ascending rows.
    for (int mode = 0; mode < 2; ++mode) {
        double best = std::numeric_limits<double>::infinity();
        SweepRow* best_row = nullptr;
        for (SweepRow& row : report.rows) {
            if (static_cast<int>(row.mode) == mode && row.mean_attack < best) {
                best = row.mean_attack;
                best_row = &row;
            }
        }
        if (best_row) best_row->best = true;
    }
    return report;
}

namespace {

std::string fmt_number(double v) { return nlohmann::json(v).dump(); }

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

// RFC 4180 rows, tolerating quoted fields with embedded separators/newlines.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    std::size_t i = 0;
    auto end_field = [&]() {
        row.push_back(std::move(field));
        field.clear();
    };
    auto end_row = [&]() {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
    };
    while (i < text.size()) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\r') {
            // swallow; \n terminates the row
        } else if (c == '\n') {
            end_row();
        } else {
            field.push_back(c);
        }
        ++i;
    }
    if (!field.empty() || !row.empty()) end_row();
    return rows;
}

}  // namespace

std::string records_to_csv(const std::vector<EvalRecord>& records) {
    const bool extra =
        std::any_of(records.begin(), records.end(), [](const EvalRecord& r) {
            return r.clip_adv_gen.has_value();
        });
    std::ostringstream out;
    out << "sample_id,mode,epsilon,clip_clean,clip_adv,linf,l2,clean_caption,adv_caption";
    if (extra) out << ",clip_adv_gen";
    out << "\r\n";
    for (const EvalRecord& r : records) {
        out << csv_quote(r.sample_id) << "," << to_string(r.mode) << "," << fmt_number(r.epsilon)
            << "," << fmt_number(r.clip_clean) << "," << fmt_number(r.clip_adv) << ","
            << fmt_number(r.linf) << "," << fmt_number(r.l2) << "," << csv_quote(r.clean_caption)
            << "," << csv_quote(r.adv_caption);
        if (extra) out << "," << (r.clip_adv_gen ? fmt_number(*r.clip_adv_gen) : "");
        out << "\r\n";
    }
    return out.str();
}

std::vector<EvalRecord> records_from_csv(const std::string& csv) {
    const auto rows = parse_csv(csv);
    if (rows.empty()) throw Error(ErrorCode::EmptyInput, "records CSV is empty");
    const auto& header = rows[0];
    const std::vector<std::string> base = {"sample_id", "mode",       "epsilon",
                                           "clip_clean", "clip_adv",  "linf",
                                           "l2",         "clean_caption", "adv_caption"};
    if (header.size() < base.size() ||
        !std::equal(base.begin(), base.end(), header.begin())) {
        throw Error(ErrorCode::InvalidArgument, "unexpected records CSV header");
    }
    const bool extra = header.size() > base.size() && header[base.size()] == "clip_adv_gen";

    std::vector<EvalRecord> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() == 1 && row[0].empty()) continue;
        if (row.size() < base.size()) {
            throw Error(ErrorCode::InvalidArgument,
                        "records CSV row " + std::to_string(i) + " has too few fields");
        }
        EvalRecord r;
        r.sample_id = row[0];
        r.mode = attack_mode_from_string(row[1]);
        r.epsilon = std::stod(row[2]);
        r.clip_clean = std::stod(row[3]);
        r.clip_adv = std::stod(row[4]);
        r.linf = std::stod(row[5]);
        r.l2 = std::stod(row[6]);
        r.clean_caption = row[7];
        r.adv_caption = row[8];
        if (extra && row.size() > 9 && !row[9].empty()) r.clip_adv_gen = std::stod(row[9]);
        out.push_back(std::move(r));
    }
    if (out.empty()) throw Error(ErrorCode::EmptyInput, "records CSV has no data rows");
    return out;
}

void write_records_csv(const std::vector<EvalRecord>& records, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << records_to_csv(records);
}

std::vector<EvalRecord> read_records_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::MissingArtifact, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return records_from_csv(buf.str());
}

}  // namespace i2t
