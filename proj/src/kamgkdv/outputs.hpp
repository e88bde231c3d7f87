#pragma once

#include <string>
#include <vector>

#include "kamgkdv/config.hpp"
#include "kamgkdv/torus.hpp"

namespace kam {

// All writers stamp the config hash; CSV bodies are deterministic (no clocks).
void ensure_dir(const std::string& path);
void write_text(const std::string& path, const std::string& body);

std::string csv_header(const std::string& config_hash, const std::string& columns);
std::string format_double(double v);

void write_manifest(const std::string& dir, const std::string& command, const RunConfig& cfg,
                    double wall_seconds);

// gnuplot companion script for a CSV with an x column and named y columns
void write_gnuplot(const std::string& path, const std::string& csv_name, const std::string& title,
                   const std::vector<std::string>& ycols, bool loglog);

void save_torus(const std::string& path, const TorusEmbedding& t, const std::string& config_hash);
TorusEmbedding load_torus(const std::string& path, std::string* config_hash = nullptr);

} // namespace kam
