#include "wgm/csv.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "wgm/units.hpp"

namespace wgm {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

}  // namespace

void write_spectrum_csv(std::ostream& out, const Spectrum& s) {
    out << "detuning_mhz,pd1,pd2,pd3\n";
    for (std::size_t i = 0; i < s.detuning.size(); ++i) {
        out << fmt(rad_per_s_to_mhz(s.detuning[i])) << ',' << fmt(s.pd1[i]) << ','
            << fmt(s.pd2[i]) << ',' << fmt(s.pd3[i]) << '\n';
    }
}

void write_scan_csv(std::ostream& out, const ScanResult& scan) {
    const char* unit = scan.axis == ScanAxis::Radial ? "gap_nm" : "rad";
    out << "index,axis,position_" << unit
        << ",fit_ok,degenerate,splitting_mhz,peak1,peak2,fwhm1_mhz,fwhm2_mhz,broadening_mhz,"
           "model_splitting_mhz,model_broadening_mhz,tip_two_g_mhz,tip_gamma_mhz,regime\n";
    for (std::size_t i = 0; i < scan.rows.size(); ++i) {
        const auto& r = scan.rows[i];
        out << i << ',' << to_string(scan.axis) << ',' << fmt(r.position) << ','
            << (r.fit_ok ? 1 : 0) << ',' << (r.degenerate ? 1 : 0) << ',' << fmt(r.splitting_mhz)
            << ',' << fmt(r.peak1) << ',' << fmt(r.peak2) << ',' << fmt(r.fwhm1_mhz) << ','
            << fmt(r.fwhm2_mhz) << ',' << fmt(r.broadening_mhz) << ','
            << fmt(r.model_splitting_mhz) << ',' << fmt(r.model_broadening_mhz) << ','
            << fmt(r.tip_two_g_mhz) << ',' << fmt(r.tip_gamma_mhz) << ','
            << (r.fit_ok ? to_string(r.regime) : std::string_view("FIT_FAILED")) << '\n';
    }
}

void emit_spectrum(const Spectrum& spectrum, const std::filesystem::path& path) {
    auto out = open_for_write(path);
    write_spectrum_csv(out, spectrum);
}

void emit_csv(const ScanResult& scan, const std::filesystem::path& path) {
    auto out = open_for_write(path);
    write_scan_csv(out, scan);
}

}  // namespace wgm
