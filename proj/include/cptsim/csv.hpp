#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cptsim/experiments.hpp"
#include "cptsim/lineshape.hpp"
#include "cptsim/spectroscopy.hpp"

namespace cpt {

// Shortest round-trip decimal form; CSV output is bit-reproducible.
std::string format_g17(double v);

uint64_t fnv1a64(std::string_view data);
std::string hex64(uint64_t v);

// All CSV files: UTF-8, LF endings, '#' comment lines before the header.
void write_spectrum_csv(const std::string& path, const Spectrum& spectrum,
                        const std::vector<std::string>& comments);

void write_fit_csv(const std::string& path, const FitResult& fit,
                   const std::vector<std::string>& comments);

void write_sweep_csv(const std::string& path, const SweepResult& sweep,
                     const std::vector<std::string>& comments);

void write_text_file(const std::string& path, const std::string& content);

std::vector<CalibrationPoint> read_calibration_csv(const std::string& path);

}  // namespace cpt
