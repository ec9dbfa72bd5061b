#pragma once

#include <array>
#include <span>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mycelogic/funcmine.hpp"
#include "mycelogic/rcnet.hpp"
#include "mycelogic/spikegates.hpp"

namespace mycelogic {

// Writes to a sibling temporary file and renames it over `path`, so readers
// never see a partial file. Throws Error on I/O failure.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

// One ratio polyline per substrate, gates along x in kRatioOrder.
std::string gate_ratio_svg(std::span<const RatioSeries> substrates);

// Count curves per gate class against theta.
std::string sweep_svg(const SweepResult& sweep, std::string_view title);

// Stems of count against table value (0..65535).
std::string function_census_svg(const FunctionCensus& c);

}  // namespace mycelogic
