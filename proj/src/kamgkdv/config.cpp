#include "kamgkdv/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace kam {

using nlohmann::json;

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hash_hex(const std::string& s) {
    char buf[17];
    snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(s)));
    return buf;
}

RunConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    RunConfig c;
    try {
        c.nu = j.at("nu").get<int>();
        std::vector<int> sites = j.at("sites").get<std::vector<int>>();
        if (int(sites.size()) != c.nu) throw ConfigError("config: nu != |sites|");
        c.sites = SiteSet(sites);
        auto& cf = j.at("coeffs");
        c.coeffs.c1 = cf.value("c1", 0.0);
        c.coeffs.c2 = cf.value("c2", 0.0);
        c.coeffs.c3 = cf.value("c3", 0.0);
        c.coeffs.c4 = cf.value("c4", 0.0);
        c.coeffs.c5 = cf.value("c5", 0.0);
        c.coeffs.c6 = cf.value("c6", 0.0);
        c.coeffs.c7 = cf.value("c7", 0.0);
        if (j.contains("f5"))
            c.f5_terms = j.at("f5").get<std::vector<std::array<double, 7>>>();
        if (j.contains("eps_ladder"))
            c.eps_ladder = j.at("eps_ladder").get<std::vector<double>>();
        else if (j.contains("eps"))
            c.eps_ladder = {j.at("eps").get<double>()};
        else
            throw ConfigError("config: eps or eps_ladder required");
        c.a = j.value("a", 0.1);
        c.tau = j.value("tau", double(c.nu) + 2.0);
        if (j.contains("trunc")) {
            auto& t = j.at("trunc");
            c.L = t.value("L", c.L);
            c.J = t.value("J", c.J);
            c.M = t.value("M", c.M);
        }
        c.seed = j.value("seed", uint64_t(1));
        c.threads = j.value("threads", 0);
        c.mc_samples = j.value("mc_samples", 10000);
        c.newton_tol = j.value("newton_tol", 1e-9);
        c.newton_max_iter = j.value("newton_max_iter", 12);
        c.sim_dt = j.value("sim_dt", 1e-3);
        c.sim_T = j.value("sim_T", 10.0);
        c.output_dir = j.value("output_dir", std::string("out"));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config field error: ") + e.what());
    }
    // validation
    for (double e : c.eps_ladder)
        if (!(e >= 0.0 && e <= 0.5)) throw ConfigError("config: eps must lie in (0, 0.5]");
    if (!(c.a > 0.0 && c.a < 1.0 / 6.0)) throw ConfigError("config: a must lie in (0, 1/6)");
    if (c.L < 1 || c.J < 1 || c.M < 8) throw ConfigError("config: invalid truncation");
    c.config_hash = hash_hex(json(j).dump());
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

} // namespace kam
