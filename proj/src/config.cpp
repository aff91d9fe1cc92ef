#include "wgm/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "wgm/units.hpp"

namespace wgm {

using nlohmann::json;

namespace {

void check_keys(const json& obj, std::string_view block, const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError(std::string(block) + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) {
            throw ConfigError(std::string(block) + ": unknown key '" + key + "'");
        }
    }
}

double number(const json& obj, std::string_view block, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        throw ConfigError(std::string(block) + ": missing required key '" + key + "'");
    }
    if (!it->is_number()) {
        throw ConfigError(std::string(block) + "." + key + ": expected a number");
    }
    const double v = it->get<double>();
    if (!std::isfinite(v)) throw ConfigError(std::string(block) + "." + key + ": not finite");
    return v;
}

double number_or(const json& obj, std::string_view block, const char* key, double fallback) {
    return obj.contains(key) ? number(obj, block, key) : fallback;
}

std::optional<double> optional_number(const json& obj, std::string_view block, const char* key) {
    if (!obj.contains(key)) return std::nullopt;
    return number(obj, block, key);
}

int integer(const json& obj, std::string_view block, const char* key, std::optional<int> fallback) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        if (fallback) return *fallback;
        throw ConfigError(std::string(block) + ": missing required key '" + key + "'");
    }
    if (!it->is_number_integer()) {
        throw ConfigError(std::string(block) + "." + key + ": expected an integer");
    }
    return it->get<int>();
}

void require(bool ok, std::string_view block, const std::string& message) {
    if (!ok) throw ConfigError(std::string(block) + ": " + message);
}

ResonatorConfig parse_resonator(const json& j) {
    constexpr std::string_view block = "resonator";
    check_keys(j, block,
               {"sphere_radius_um", "wavelength_nm", "azimuthal_order", "sphere_index",
                "intrinsic_q", "mode_volume_um3", "polar_width_rad", "evanescent_decay_nm"});
    ResonatorConfig r;
    r.sphere_radius_um = number(j, block, "sphere_radius_um");
    r.wavelength_nm = number(j, block, "wavelength_nm");
    r.azimuthal_order = integer(j, block, "azimuthal_order", std::nullopt);
    r.sphere_index = number(j, block, "sphere_index");
    r.intrinsic_q = number(j, block, "intrinsic_q");
    r.mode_volume_um3 = number(j, block, "mode_volume_um3");
    r.polar_width_rad = number(j, block, "polar_width_rad");
    r.evanescent_decay_nm = optional_number(j, block, "evanescent_decay_nm");
    require(r.sphere_radius_um > 0, block, "sphere_radius_um must be > 0");
    require(r.wavelength_nm > 0, block, "wavelength_nm must be > 0");
    require(r.azimuthal_order > 0, block, "azimuthal_order must be > 0");
    require(r.sphere_index > 1, block, "sphere_index must be > 1");
    require(r.intrinsic_q > 0, block, "intrinsic_q must be > 0");
    require(r.mode_volume_um3 > 0, block, "mode_volume_um3 must be > 0");
    require(r.polar_width_rad > 0, block, "polar_width_rad must be > 0");
    require(!r.evanescent_decay_nm || *r.evanescent_decay_nm > 0, block,
            "evanescent_decay_nm must be > 0");
    return r;
}

ParticleConfig parse_particle(const json& j, std::string_view block) {
    ParticleConfig p;
    p.polarizability_um3 = optional_number(j, block, "polarizability_um3");
    p.radius_nm = optional_number(j, block, "radius_nm");
    p.refractive_index = optional_number(j, block, "refractive_index");
    const bool by_alpha = p.polarizability_um3.has_value();
    const bool by_size = p.radius_nm.has_value() || p.refractive_index.has_value();
    require(by_alpha != by_size, block,
            "give exactly one of polarizability_um3 or radius_nm + refractive_index");
    if (by_size) {
        require(p.radius_nm && p.refractive_index, block,
                "radius_nm and refractive_index must be given together");
        require(*p.radius_nm >= 0, block, "radius_nm must be >= 0");
        require(*p.refractive_index >= 1, block, "refractive_index must be >= 1");
    } else {
        require(*p.polarizability_um3 >= 0, block, "polarizability_um3 must be >= 0");
    }
    return p;
}

void particle_to_json(const ParticleConfig& p, json& out) {
    if (p.polarizability_um3) out["polarizability_um3"] = *p.polarizability_um3;
    if (p.radius_nm) out["radius_nm"] = *p.radius_nm;
    if (p.refractive_index) out["refractive_index"] = *p.refractive_index;
}

TipScan parse_scan(const json& j) {
    constexpr std::string_view block = "tip.scan";
    if (!j.is_object() || !j.contains("axis") || !j["axis"].is_string()) {
        throw ConfigError("tip.scan: missing axis");
    }
    TipScan scan;
    const auto axis = j["axis"].get<std::string>();
    if (axis == "phi") {
        scan.axis = ScanAxis::Phi;
    } else if (axis == "theta") {
        scan.axis = ScanAxis::Theta;
    } else if (axis == "radial") {
        scan.axis = ScanAxis::Radial;
    } else {
        throw ConfigError("tip.scan.axis: expected phi, theta or radial");
    }
    if (scan.axis == ScanAxis::Radial) {
        check_keys(j, block, {"axis", "start_gap_nm", "stop_gap_nm", "steps"});
        scan.start = number(j, block, "start_gap_nm");
        scan.stop = number(j, block, "stop_gap_nm");
        require(scan.start >= 0 && scan.stop >= 0, block, "gaps must be >= 0");
    } else {
        check_keys(j, block, {"axis", "start_rad", "stop_rad", "steps"});
        scan.start = number(j, block, "start_rad");
        scan.stop = number(j, block, "stop_rad");
    }
    scan.steps = integer(j, block, "steps", std::nullopt);
    require(scan.steps >= 2, block, "steps must be >= 2");
    require(scan.start != scan.stop, block, "scan span must be non-zero");
    return scan;
}

TipConfig parse_tip(const json& j) {
    constexpr std::string_view block = "tip";
    check_keys(j, block,
               {"polarizability_um3", "radius_nm", "refractive_index", "overlap_length_nm",
                "field_overlap", "gap_nm", "theta_rad", "phi_rad", "scan"});
    TipConfig tip;
    tip.particle = parse_particle(j, block);
    tip.overlap_length_nm = optional_number(j, block, "overlap_length_nm");
    tip.field_overlap = number_or(j, block, "field_overlap", 1.0);
    tip.gap_nm = number_or(j, block, "gap_nm", 0.0);
    tip.theta_rad = number_or(j, block, "theta_rad", 0.0);
    tip.phi_rad = number_or(j, block, "phi_rad", 0.0);
    require(!tip.overlap_length_nm || *tip.overlap_length_nm > 0, block,
            "overlap_length_nm must be > 0");
    require(tip.field_overlap > 0 && tip.field_overlap <= 1, block,
            "field_overlap must lie in (0, 1]");
    require(tip.gap_nm >= 0, block, "gap_nm must be >= 0");
    if (j.contains("scan")) tip.scan = parse_scan(j["scan"]);
    return tip;
}

}  // namespace

WgmMode ResonatorConfig::mode() const {
    const double lam = wavelength_nm * kNanometre;
    const double decay = evanescent_decay_nm ? *evanescent_decay_nm * kNanometre
                                             : default_evanescent_decay(lam, sphere_index);
    WgmMode m{sphere_radius_um * kMicrometre,
              lam,
              azimuthal_order,
              sphere_index,
              intrinsic_q,
              mode_volume_um3 * kCubicMicrometre,
              polar_width_rad,
              decay};
    m.validate();
    return m;
}

ScattererSpec ParticleConfig::spec() const {
    if (polarizability_um3) return ScattererSpec::from_polarizability(*polarizability_um3 * kCubicMicrometre);
    return ScattererSpec::from_radius(*radius_nm * kNanometre, *refractive_index);
}

std::string_view to_string(ScanAxis axis) {
    switch (axis) {
        case ScanAxis::Phi: return "phi";
        case ScanAxis::Theta: return "theta";
        case ScanAxis::Radial: return "radial";
    }
    return "phi";
}

std::vector<double> TipScan::positions() const {
    std::vector<double> out(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) {
        out[i] = start + (stop - start) * static_cast<double>(i) / (steps - 1);
    }
    return out;
}

std::vector<double> LaserConfig::grid() const {
    std::vector<double> out(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double mhz = center_mhz - 0.5 * span_mhz + span_mhz * i / (points - 1);
        out[i] = mhz_to_rad_per_s(mhz);
    }
    return out;
}

std::string_view to_string(Channel channel) {
    switch (channel) {
        case Channel::Pd1: return "pd1";
        case Channel::Pd2: return "pd2";
        case Channel::Pd3: return "pd3";
    }
    return "pd2";
}

Channel parse_channel(std::string_view name) {
    if (name == "pd1") return Channel::Pd1;
    if (name == "pd2") return Channel::Pd2;
    if (name == "pd3") return Channel::Pd3;
    throw ConfigError("unknown channel '" + std::string(name) + "' (expected pd1, pd2 or pd3)");
}

ExperimentConfig parse_config(std::string_view json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    check_keys(root, "config",
               {"seed", "resonator", "intrinsic_scatterers", "tip", "laser", "noise", "detection",
                "output"});

    ExperimentConfig cfg;
    if (!root.contains("resonator")) throw ConfigError("config: missing required block 'resonator'");
    cfg.resonator = parse_resonator(root["resonator"]);

    if (root.contains("seed")) {
        if (!root["seed"].is_number_unsigned() && !root["seed"].is_number_integer()) {
            throw ConfigError("seed: expected a non-negative integer");
        }
        if (root["seed"].is_number_integer() && root["seed"].get<std::int64_t>() < 0) {
            throw ConfigError("seed: expected a non-negative integer");
        }
        cfg.seed = root["seed"].get<std::uint64_t>();
    }

    if (root.contains("intrinsic_scatterers")) {
        const auto& block = root["intrinsic_scatterers"];
        check_keys(block, "intrinsic_scatterers", {"placements", "ensemble"});
        if (block.contains("placements")) {
            if (!block["placements"].is_array()) {
                throw ConfigError("intrinsic_scatterers.placements: expected an array");
            }
            for (const auto& item : block["placements"]) {
                constexpr std::string_view name = "intrinsic_scatterers.placements[]";
                check_keys(item, name,
                           {"polarizability_um3", "radius_nm", "refractive_index", "gap_nm",
                            "theta_rad", "phi_rad"});
                IntrinsicScatterer s;
                s.particle = parse_particle(item, name);
                s.gap_nm = number_or(item, name, "gap_nm", 0.0);
                s.theta_rad = number_or(item, name, "theta_rad", 0.0);
                s.phi_rad = number_or(item, name, "phi_rad", 0.0);
                require(s.gap_nm >= 0, name, "gap_nm must be >= 0");
                cfg.intrinsic.push_back(s);
            }
        }
        if (block.contains("ensemble")) {
            constexpr std::string_view name = "intrinsic_scatterers.ensemble";
            const auto& e = block["ensemble"];
            check_keys(e, name, {"count", "polarizability_min_um3", "polarizability_max_um3"});
            ScattererEnsemble ens;
            ens.count = integer(e, name, "count", 50);
            ens.polarizability_min_um3 =
                number_or(e, name, "polarizability_min_um3", ens.polarizability_min_um3);
            ens.polarizability_max_um3 =
                number_or(e, name, "polarizability_max_um3", ens.polarizability_max_um3);
            require(ens.count >= 0, name, "count must be >= 0");
            require(ens.polarizability_min_um3 > 0 &&
                        ens.polarizability_max_um3 >= ens.polarizability_min_um3,
                    name, "need 0 < polarizability_min_um3 <= polarizability_max_um3");
            cfg.ensemble = ens;
        }
    }

    if (root.contains("tip")) cfg.tip = parse_tip(root["tip"]);

    if (root.contains("laser")) {
        const auto& l = root["laser"];
        check_keys(l, "laser", {"center_mhz", "span_mhz", "points"});
        cfg.laser.center_mhz = number_or(l, "laser", "center_mhz", cfg.laser.center_mhz);
        cfg.laser.span_mhz = number_or(l, "laser", "span_mhz", cfg.laser.span_mhz);
        cfg.laser.points = integer(l, "laser", "points", cfg.laser.points);
    }
    require(cfg.laser.span_mhz > 0, "laser", "span_mhz must be > 0");
    require(cfg.laser.points >= 16, "laser", "points must be >= 16");

    if (root.contains("noise")) {
        check_keys(root["noise"], "noise", {"relative_sigma"});
        cfg.noise_relative_sigma = number_or(root["noise"], "noise", "relative_sigma", 0.0);
        require(cfg.noise_relative_sigma >= 0, "noise", "relative_sigma must be >= 0");
    }

    if (root.contains("detection")) {
        check_keys(root["detection"], "detection", {"outcoupling_fraction"});
        cfg.outcoupling_fraction =
            number_or(root["detection"], "detection", "outcoupling_fraction", 0.5);
        require(cfg.outcoupling_fraction > 0 && cfg.outcoupling_fraction <= 1, "detection",
                "outcoupling_fraction must lie in (0, 1]");
    }

    if (root.contains("output")) {
        const auto& o = root["output"];
        check_keys(o, "output", {"directory", "channel", "write_spectra"});
        if (o.contains("directory")) {
            if (!o["directory"].is_string()) throw ConfigError("output.directory: expected a string");
            cfg.output.directory = o["directory"].get<std::string>();
        }
        if (o.contains("channel")) {
            if (!o["channel"].is_string()) throw ConfigError("output.channel: expected a string");
            cfg.output.channel = parse_channel(o["channel"].get<std::string>());
        }
        if (o.contains("write_spectra")) {
            if (!o["write_spectra"].is_boolean()) {
                throw ConfigError("output.write_spectra: expected a boolean");
            }
            cfg.output.write_spectra = o["write_spectra"].get<bool>();
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
    json root;
    root["seed"] = cfg.seed;
    const auto& r = cfg.resonator;
    json res{{"sphere_radius_um", r.sphere_radius_um},
             {"wavelength_nm", r.wavelength_nm},
             {"azimuthal_order", r.azimuthal_order},
             {"sphere_index", r.sphere_index},
             {"intrinsic_q", r.intrinsic_q},
             {"mode_volume_um3", r.mode_volume_um3},
             {"polar_width_rad", r.polar_width_rad}};
    if (r.evanescent_decay_nm) res["evanescent_decay_nm"] = *r.evanescent_decay_nm;
    root["resonator"] = res;

    json intrinsic = json::object();
    json placements = json::array();
    for (const auto& s : cfg.intrinsic) {
        json item{{"gap_nm", s.gap_nm}, {"theta_rad", s.theta_rad}, {"phi_rad", s.phi_rad}};
        particle_to_json(s.particle, item);
        placements.push_back(item);
    }
    intrinsic["placements"] = placements;
    if (cfg.ensemble) {
        intrinsic["ensemble"] = {{"count", cfg.ensemble->count},
                                 {"polarizability_min_um3", cfg.ensemble->polarizability_min_um3},
                                 {"polarizability_max_um3", cfg.ensemble->polarizability_max_um3}};
    }
    root["intrinsic_scatterers"] = intrinsic;

    if (cfg.tip) {
        const auto& t = *cfg.tip;
        json tip{{"field_overlap", t.field_overlap},
                 {"gap_nm", t.gap_nm},
                 {"theta_rad", t.theta_rad},
                 {"phi_rad", t.phi_rad}};
        particle_to_json(t.particle, tip);
        if (t.overlap_length_nm) tip["overlap_length_nm"] = *t.overlap_length_nm;
        if (t.scan) {
            json scan{{"axis", std::string(to_string(t.scan->axis))}, {"steps", t.scan->steps}};
            if (t.scan->axis == ScanAxis::Radial) {
                scan["start_gap_nm"] = t.scan->start;
                scan["stop_gap_nm"] = t.scan->stop;
            } else {
                scan["start_rad"] = t.scan->start;
                scan["stop_rad"] = t.scan->stop;
            }
            tip["scan"] = scan;
        }
        root["tip"] = tip;
    }
    root["laser"] = {{"center_mhz", cfg.laser.center_mhz},
                     {"span_mhz", cfg.laser.span_mhz},
                     {"points", cfg.laser.points}};
    root["noise"] = {{"relative_sigma", cfg.noise_relative_sigma}};
    root["detection"] = {{"outcoupling_fraction", cfg.outcoupling_fraction}};
    root["output"] = {{"directory", cfg.output.directory},
                      {"channel", std::string(to_string(cfg.output.channel))},
                      {"write_spectra", cfg.output.write_spectra}};
    return root.dump(2);
}

std::uint64_t run_hash(const ExperimentConfig& config) {
    // Where results are written does not change what is computed.
    ExperimentConfig canonical = config;
    canonical.output.directory.clear();
    const std::string text = config_to_json(canonical);
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace wgm
