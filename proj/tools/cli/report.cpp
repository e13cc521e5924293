/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "olrw/cli/cli.hpp"

namespace olrw::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v, const char* fmt = "%.4f")
{
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void print(std::ostream& out) const
    {
        std::vector<std::size_t> w(header.size());
        for (std::size_t c = 0; c < header.size(); ++c) {
            w[c] = header[c].size();
            for (const auto& r : rows)
                w[c] = std::max(w[c], r[c].size());
        }
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t c = 0; c < cells.size(); ++c)
                out << (c ? "  " : "") << cells[c] << std::string(w[c] - cells[c].size(), ' ');
            out << "\n";
        };
        line(header);
        std::vector<std::string> rule;
        for (auto n : w)
            rule.push_back(std::string(n, '-'));
        line(rule);
        for (const auto& r : rows)
            line(r);
    }

    std::string csv() const
    {
        std::string s;
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t c = 0; c < cells.size(); ++c)
                s += (c ? "," : "") + cells[c];
            s += "\n";
        };
        line(header);
        for (const auto& r : rows)
            line(r);
        return s;
    }
};

/// Plain SVG bar chart.
std::string bar_chart(const std::string& title, const std::string& y_label,
                      const std::vector<std::pair<std::string, double>>& bars)
{
    const int W = 640, H = 360, left = 70, right = 20, top = 40, bottom = 70;
    double ymax = 0;
    for (const auto& b : bars)
        ymax = std::max(ymax, b.second);
    if (ymax <= 0)
        ymax = 1;
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
      << title << "</text>\n"
      << "<text x=\"16\" y=\"" << H / 2 << "\" transform=\"rotate(-90 16 " << H / 2
      << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << y_label << "</text>\n"
      << "<line x1=\"" << left << "\" y1=\"" << H - bottom << "\" x2=\"" << W - right << "\" y2=\"" << H - bottom
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << H - bottom
      << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << left - 6 << "\" y=\"" << top + 4 << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
      << "font-size=\"10\">" << num(ymax, "%.3g") << "</text>\n";
    const double plot_w = W - left - right, plot_h = H - top - bottom;
    const double slot = bars.empty() ? plot_w : plot_w / static_cast<double>(bars.size());
    for (std::size_t i = 0; i < bars.size(); ++i) {
        const double h = plot_h * bars[i].second / ymax;
        const double x = left + slot * static_cast<double>(i) + slot * 0.15;
        s << "<rect x=\"" << num(x, "%.1f") << "\" y=\"" << num(H - bottom - h, "%.1f") << "\" width=\""
          << num(slot * 0.7, "%.1f") << "\" height=\"" << num(h, "%.1f") << "\" fill=\"#4a78b0\"/>\n"
          << "<text x=\"" << num(x + slot * 0.35, "%.1f") << "\" y=\"" << H - bottom + 14
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << bars[i].first << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

/// Control timeline: one mark per command at (issue time, xApp row).
std::string timeline_chart(const json& commands)
{
    const int W = 640, H = 240, left = 130, right = 20, top = 30, bottom = 40;
    std::vector<std::string> rows;
    double tmax = 1;
    for (const auto& c : commands) {
        const auto x = c.value("xapp", std::string());
        if (std::find(rows.begin(), rows.end(), x) == rows.end())
            rows.push_back(x);
        tmax = std::max(tmax, c.value("issued_ns", 0.0) / 1e9);
    }
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
      << "RIC control timeline</text>\n"
      << "<text x=\"" << W / 2 << "\" y=\"" << H - 8 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"11\">time (s), 0 to " << num(tmax, "%.0f") << "</text>\n";
    const double row_h = rows.empty() ? 0 : (H - top - bottom) / static_cast<double>(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        s << "<text x=\"" << left - 8 << "\" y=\"" << num(top + row_h * (r + 0.5) + 4, "%.1f")
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << rows[r] << "</text>\n";
    for (const auto& c : commands) {
        const auto r = std::find(rows.begin(), rows.end(), c.value("xapp", std::string())) - rows.begin();
        const double x = left + (W - left - right) * c.value("issued_ns", 0.0) / 1e9 / tmax;
        s << "<circle cx=\"" << num(x, "%.1f") << "\" cy=\"" << num(top + row_h * (r + 0.5), "%.1f")
          << "\" r=\"3\" fill=\"#c0504d\"/>\n";
    }
    s << "</svg>\n";
    return s.str();
}

}  // namespace

int cmd_report(const std::string& report_file, const std::string& out_dir, std::ostream& out, std::ostream& err)
{
    std::ifstream in(report_file);
    if (!in) {
        err << "olrw report: cannot read " << report_file << "\n";
        return kUsage;
    }
    json rep;
    try {
        rep = json::parse(in);
    } catch (const json::exception& e) {
        err << "olrw report: " << report_file << ": " << e.what() << "\n";
        return kUsage;
    }
    if (!rep.is_object()) {
        err << "olrw report: " << report_file << ": not a report object\n";
        return kUsage;
    }

    Table devices{{"device", "tx", "delivered", "pdr", "energy_j", "sf", "tx_power_dbm"}, {}};
    for (const auto& d : rep.value("devices", json::array()))
        devices.rows.push_back({d.value("dev_addr", ""), std::to_string(d.value("transmitted", 0)),
                                std::to_string(d.value("delivered", 0)), num(d.value("pdr", 0.0)),
                                num(d.value("energy_j", 0.0), "%.6f"), std::to_string(d.value("final_sf", 0)),
                                std::to_string(d.value("final_tx_power_dbm", 0))});

    Table by_sf{{"sf", "tx", "delivered", "pdr"}, {}};
    std::vector<std::pair<std::string, double>> pdr_bars;
    const auto sf_stats = rep.value("uplinks_by_sf", json::object());
    for (const auto& [sf, v] : sf_stats.items()) {
        const double tx = v.value("transmitted", 0.0), ok = v.value("delivered", 0.0);
        const double pdr = tx > 0 ? ok / tx : 0.0;
        by_sf.rows.push_back({sf, num(tx, "%.0f"), num(ok, "%.0f"), num(pdr)});
        pdr_bars.emplace_back("SF" + sf, pdr);
    }
    std::sort(by_sf.rows.begin(), by_sf.rows.end(),
              [](const auto& a, const auto& b) { return std::stoi(a[0]) < std::stoi(b[0]); });
    std::sort(pdr_bars.begin(), pdr_bars.end(),
              [](const auto& a, const auto& b) { return std::stoi(a.first.substr(2)) < std::stoi(b.first.substr(2)); });

    Table timeline{{"issued_s", "xapp", "target", "path", "value", "latency_ms"}, {}};
    const auto commands = rep.contains("ric") ? rep["ric"].value("commands", json::array()) : json::array();
    for (const auto& c : commands) {
        const double issued = c.value("issued_ns", 0.0), ind = c.value("indication_ns", 0.0);
        const auto applied = c.contains("applied_ns") && c["applied_ns"].is_number() ? c["applied_ns"].get<double>() : -1.0;
        timeline.rows.push_back({num(issued / 1e9, "%.3f"), c.value("xapp", ""), c.value("target", ""), c.value("path", ""),
                                 c.contains("value") ? c["value"].dump() : "",
                                 applied < 0 ? "" : num((applied - ind) / 1e6, "%.1f")});
    }
    // CSV cells must not contain the separator.
    for (auto& r : timeline.rows)
        std::replace(r[4].begin(), r[4].end(), ',', ';');

    if (rep.contains("scenario"))
        out << "scenario " << rep["scenario"].get<std::string>() << ", mode " << rep.value("mode", "") << ", seed "
            << rep.value("seed", 0) << ", pdr " << num(rep.value("pdr", 0.0)) << "\n\n";
    out << "Devices\n";
    devices.print(out);
    out << "\nPDR by spreading factor\n";
    by_sf.print(out);
    out << "\nRIC controls\n";
    timeline.print(out);

    if (!out_dir.empty()) {
        std::vector<std::pair<std::string, double>> energy_bars;
        for (const auto& r : devices.rows)
            energy_bars.emplace_back(r[0], std::stod(r[4]));
        try {
            fs::create_directories(out_dir);
            const fs::path dir(out_dir);
            auto put = [&](const char* name, const std::string& text) {
                std::ofstream f(dir / name, std::ios::binary);
                f << text;
                if (!f)
                    throw fs::filesystem_error("cannot write", dir / name, std::make_error_code(std::errc::io_error));
            };
            put("pdr_by_device.csv", devices.csv());
            put("pdr_vs_sf.csv", by_sf.csv());
            put("ric_timeline.csv", timeline.csv());
            put("pdr_vs_sf.svg", bar_chart("PDR vs spreading factor", "PDR", pdr_bars));
            put("energy_per_device.svg", bar_chart("Uplink energy per device", "energy (J)", energy_bars));
            put("ric_timeline.svg", timeline_chart(commands));
        } catch (const fs::filesystem_error& e) {
            err << "olrw report: " << e.what() << "\n";
            return kFailure;
        }
        out << "\nplots: " << out_dir << "\n";
    }
    return kOk;
}

}  // namespace olrw::cli
