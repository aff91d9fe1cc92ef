#pragma once

#include <filesystem>
#include <iosfwd>

#include "wgm/coupled_mode.hpp"
#include "wgm/experiments.hpp"

namespace wgm {

// CSV output: header row, UTF-8, '.' decimal separator, fixed "%.12g"
// formatting so identical inputs give byte-identical files.

void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum);
void write_scan_csv(std::ostream& out, const ScanResult& scan);

void emit_spectrum(const Spectrum& spectrum, const std::filesystem::path& path);
void emit_csv(const ScanResult& scan, const std::filesystem::path& path);

}  // namespace wgm
