#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kamgkdv/gkdv.hpp"
#include "kamgkdv/fourier.hpp"

namespace kam {

// Run description for the command-line harness; parsed from a JSON file.
struct RunConfig {
    int nu = 1;
    SiteSet sites;
    Coefficients coeffs;
    std::vector<std::array<double, 7>> f5_terms; // optional quintic rows: j1..j5, re, im
    std::vector<double> eps_ladder;              // at least one entry
    double a = 0.1;    // gamma = eps^{2+a}
    double tau = 0;    // defaults to nu + 2 when absent
    int L = 8;
    int J = 24;
    int M = 128;
    uint64_t seed = 1;
    int threads = 0;
    int mc_samples = 10000;
    double newton_tol = 1e-9;
    int newton_max_iter = 12;
    double sim_dt = 1e-3;
    double sim_T = 10.0;
    std::string output_dir = "out";
    std::string config_hash; // filled by the loader

    double eps() const { return eps_ladder.front(); }
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

uint64_t fnv1a(const std::string& s);
std::string hash_hex(const std::string& s);

} // namespace kam
