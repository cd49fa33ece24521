#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include "i2t/errors.hpp"
#include "i2t/evaluation.hpp"

namespace i2t {

namespace {

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

std::string eps_label(double eps) {
    std::string s = nlohmann::json(eps).dump();
    return s;
}

std::string mean_std(double mean, double sd) {
    return fixed(mean, 4) + " ± " + fixed(sd, 4);
}

}  // namespace

nlohmann::json report_to_json(const SweepReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const SweepRow& r : report.rows) {
        rows.push_back({{"mode", to_string(r.mode)},
                        {"epsilon", r.epsilon},
                        {"mean_no_attack", r.mean_no_attack},
                        {"std_no_attack", r.std_no_attack},
                        {"mean_attack", r.mean_attack},
                        {"std_attack", r.std_attack},
                        {"n", r.n},
                        {"best", r.best}});
    }
    return nlohmann::json{{"rows", std::move(rows)}};
}

SweepReport report_from_json(const nlohmann::json& j) {
    SweepReport report;
    for (const auto& e : j.at("rows")) {
        SweepRow r;
        r.mode = attack_mode_from_string(e.at("mode").get<std::string>());
        e.at("epsilon").get_to(r.epsilon);
        e.at("mean_no_attack").get_to(r.mean_no_attack);
        e.at("std_no_attack").get_to(r.std_no_attack);
        e.at("mean_attack").get_to(r.mean_attack);
        e.at("std_attack").get_to(r.std_attack);
        e.at("n").get_to(r.n);
        e.at("best").get_to(r.best);
        report.rows.push_back(r);
    }
    return report;
}

std::string render_report_table(const SweepReport& report) {
    std::ostringstream out;
    for (int mode = 0; mode < 2; ++mode) {
        std::vector<const SweepRow*> rows;
        for (const SweepRow& r : report.rows) {
            if (static_cast<int>(r.mode) == mode) rows.push_back(&r);
        }
        if (rows.empty()) continue;
        out << (mode == 0 ? "Untargeted" : "Targeted") << "\n";
        out << "epsilon | No Attack | Our Attack\n";
        for (const SweepRow* r : rows) {
            const std::string attack_cell = mean_std(r->mean_attack, r->std_attack);
            out << eps_label(r->epsilon) << " | " << mean_std(r->mean_no_attack, r->std_no_attack)
                << " | " << (r->best ? "**" + attack_cell + "**" : attack_cell) << "  (n="
                << r->n << ")\n";
        }
        out << "\n";
    }
    return out.str();
}

std::string render_report_svg(const SweepReport& report) {
    // Per-epsilon bar pairs (No Attack vs Our Attack) with std whiskers,
    // one panel per mode.
    constexpr int kBar = 26;
    constexpr int kGapInGroup = 6;
    constexpr int kGroupGap = 30;
    constexpr int kPanelHeight = 230;
    constexpr int kPanelTop = 40;
    constexpr int kLeft = 56;

    std::vector<std::vector<const SweepRow*>> panels;
    for (int mode = 0; mode < 2; ++mode) {
        std::vector<const SweepRow*> rows;
        for (const SweepRow& r : report.rows) {
            if (static_cast<int>(r.mode) == mode) rows.push_back(&r);
        }
        if (!rows.empty()) panels.push_back(std::move(rows));
    }
    if (panels.empty()) throw Error(ErrorCode::EmptyInput, "report has no rows");

    double vmax = 0.0;
    for (const auto& rows : panels) {
        for (const SweepRow* r : rows) {
            vmax = std::max({vmax, r->mean_no_attack + r->std_no_attack,
                             r->mean_attack + r->std_attack});
        }
    }
    if (vmax <= 0.0) vmax = 1.0;
    vmax *= 1.15;

    std::size_t max_groups = 0;
    for (const auto& rows : panels) max_groups = std::max(max_groups, rows.size());
    const int width =
        kLeft + static_cast<int>(max_groups) * (2 * kBar + kGapInGroup + kGroupGap) + 40;
    const int height = static_cast<int>(panels.size()) * (kPanelTop + kPanelHeight + 40);

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";

    int panel_y = 0;
    for (std::size_t p = 0; p < panels.size(); ++p) {
        const auto& rows = panels[p];
        const int base_y = panel_y + kPanelTop + kPanelHeight;
        const int mode = static_cast<int>(rows[0]->mode);
        svg << "<text x=\"" << kLeft << "\" y=\"" << panel_y + 20
            << "\" font-size=\"14\" font-weight=\"bold\">"
            << (mode == 0 ? "Untargeted" : "Targeted") << " CLIP score</text>\n";
        svg << "<line x1=\"" << kLeft << "\" y1=\"" << base_y << "\" x2=\"" << width - 20
            << "\" y2=\"" << base_y << "\" stroke=\"#333\"/>\n";
        // y-axis reference lines
        for (int tick = 0; tick <= 4; ++tick) {
            const double v = vmax * tick / 4.0;
            const int y = base_y - static_cast<int>(kPanelHeight * tick / 4.0);
            svg << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << y << "\" x2=\"" << width - 20
                << "\" y2=\"" << y << "\" stroke=\"#ddd\"/>\n";
            svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + 4
                << "\" text-anchor=\"end\">" << fixed(v, 2) << "</text>\n";
        }
        int x = kLeft + kGroupGap / 2;
        for (const SweepRow* r : rows) {
            struct BarSpec {
                double mean;
                double sd;
                const char* fill;
            } bars[2] = {{r->mean_no_attack, r->std_no_attack, "#6688bb"},
                         {r->mean_attack, r->std_attack, "#bb5544"}};
            for (const BarSpec& b : bars) {
                const int h = static_cast<int>(kPanelHeight * std::clamp(b.mean / vmax, 0.0, 1.0));
                const int top = base_y - h;
                svg << "<rect x=\"" << x << "\" y=\"" << top << "\" width=\"" << kBar
                    << "\" height=\"" << h << "\" fill=\"" << b.fill << "\"/>\n";
                const int cx = x + kBar / 2;
                const int whisker_top =
                    base_y - static_cast<int>(kPanelHeight *
                                              std::clamp((b.mean + b.sd) / vmax, 0.0, 1.0));
                const int whisker_bot =
                    base_y - static_cast<int>(kPanelHeight *
                                              std::clamp((b.mean - b.sd) / vmax, 0.0, 1.0));
                svg << "<line x1=\"" << cx << "\" y1=\"" << whisker_top << "\" x2=\"" << cx
                    << "\" y2=\"" << whisker_bot << "\" stroke=\"#222\"/>\n";
                x += kBar + kGapInGroup;
            }
            svg << "<text x=\"" << x - kBar - kGapInGroup / 2 << "\" y=\"" << base_y + 16
                << "\" text-anchor=\"middle\">eps=" << eps_label(r->epsilon) << "</text>\n";
            x += kGroupGap - kGapInGroup;
        }
        panel_y = base_y + 40;
    }
    svg << "<text x=\"" << kLeft << "\" y=\"" << height - 8
        << "\">blue: no attack, red: our attack; whiskers: std</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace i2t
