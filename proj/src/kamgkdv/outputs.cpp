#include "kamgkdv/outputs.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace kam {

using nlohmann::json;

void ensure_dir(const std::string& path) {
    std::filesystem::create_directories(path);
}

void write_text(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << body;
}

std::string csv_header(const std::string& config_hash, const std::string& columns) {
    return "# config " + config_hash + "\n" + columns + "\n";
}

std::string format_double(double v) {
    char buf[40];
    snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_manifest(const std::string& dir, const std::string& command, const RunConfig& cfg,
                    double wall_seconds) {
    json m;
    m["command"] = command;
    m["config_hash"] = cfg.config_hash;
    m["version"] = "0.1.0";
    m["wall_seconds"] = wall_seconds;
    m["seed"] = cfg.seed;
    write_text(dir + "/manifest.json", m.dump(2) + "\n");
}

void write_gnuplot(const std::string& path, const std::string& csv_name, const std::string& title,
                   const std::vector<std::string>& ycols, bool loglog) {
    std::ostringstream s;
    s << "set datafile separator ','\n";
    s << "set key autotitle columnhead\n";
    s << "set title '" << title << "'\n";
    if (loglog) s << "set logscale xy\n";
    s << "plot";
    for (size_t i = 0; i < ycols.size(); ++i) {
        if (i) s << ",";
        s << " '" << csv_name << "' using 1:" << (i + 2) << " with linespoints";
    }
    s << "\n";
    write_text(path, s.str());
}

void save_torus(const std::string& path, const TorusEmbedding& t, const std::string& config_hash) {
    json j;
    j["config_hash"] = config_hash;
    j["nu"] = t.nu();
    j["sites"] = t.sites.positive;
    j["eps"] = t.eps;
    j["level"] = t.level;
    std::vector<double> xi(t.xi.data(), t.xi.data() + t.xi.size());
    std::vector<double> om(t.omega.data(), t.omega.data() + t.omega.size());
    std::vector<double> ze(t.zeta.data(), t.zeta.data() + t.zeta.size());
    j["xi"] = xi;
    j["omega"] = om;
    j["zeta"] = ze;
    json modes = json::array();
    for (auto& [l, v] : t.modes) {
        json row;
        std::vector<int> lv(l.begin(), l.begin() + t.nu());
        row["l"] = lv;
        row["re"] = v.real();
        row["im"] = v.imag();
        modes.push_back(row);
    }
    j["modes"] = modes;
    write_text(path, j.dump() + "\n");
}

TorusEmbedding load_torus(const std::string& path, std::string* config_hash) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open torus file " + path);
    json j;
    in >> j;
    TorusEmbedding t;
    t.sites = SiteSet(j.at("sites").get<std::vector<int>>());
    auto xi = j.at("xi").get<std::vector<double>>();
    auto om = j.at("omega").get<std::vector<double>>();
    auto ze = j.at("zeta").get<std::vector<double>>();
    t.xi = Eigen::Map<Vec>(xi.data(), long(xi.size()));
    t.omega = Eigen::Map<Vec>(om.data(), long(om.size()));
    t.zeta = Eigen::Map<Vec>(ze.data(), long(ze.size()));
    t.eps = j.at("eps").get<double>();
    t.level = j.at("level").get<std::string>();
    for (auto& row : j.at("modes")) {
        LVec l = lzero();
        auto lv = row.at("l").get<std::vector<int>>();
        for (size_t q = 0; q < lv.size(); ++q) l[q] = lv[q];
        t.modes[l] = Cplx(row.at("re").get<double>(), row.at("im").get<double>());
    }
    if (config_hash) *config_hash = j.value("config_hash", "");
    return t;
}

} // namespace kam
