#include "helium/config.hpp"

#include "helium/record_io.hpp"

#include <fstream>
#include <stdexcept>
#include <string>

namespace helium {

namespace {

double get_real(const nlohmann::json& v, const std::string& key)
{
    if (!v.is_number()) throw std::invalid_argument("config key '" + key + "' must be a number");
    return v.get<double>();
}

std::uint64_t get_count(const nlohmann::json& v, const std::string& key)
{
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        throw std::invalid_argument("config key '" + key + "' must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

std::string get_string(const nlohmann::json& v, const std::string& key)
{
    if (!v.is_string()) throw std::invalid_argument("config key '" + key + "' must be a string");
    return v.get<std::string>();
}

void set_bound(std::optional<Range>& r, bool upper, const nlohmann::json& v, const std::string& key)
{
    if (v.is_null()) {
        r.reset();
        return;
    }
    const double x = get_real(v, key);
    Range cur = r.value_or(Range{x, x});
    (upper ? cur.hi : cur.lo) = x;
    r = cur;
}

nlohmann::json bound(const std::optional<Range>& r, bool upper)
{
    if (!r) return nullptr;
    return upper ? r->hi : r->lo;
}

} // namespace

void apply_config_json(EnsembleConfig& cfg, const nlohmann::json& j)
{
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    // Range bounds are applied pairwise after the scalar keys so that the
    // order of keys in the file does not matter.
    std::optional<nlohmann::json> e_min, e_max, m_min, m_max;
    for (const auto& [key, v] : j.items()) {
        if (key == "n_points") cfg.n_points = get_count(v, key);
        else if (key == "seed") cfg.seed = get_count(v, key);
        else if (key == "workers") cfg.workers = static_cast<unsigned>(get_count(v, key));
        else if (key == "m") cfg.params.m = get_real(v, key);
        else if (key == "e") cfg.params.e = get_real(v, key);
        else if (key == "epsilon") cfg.params.eps = get_real(v, key);
        else if (key == "h0") cfg.params.h0 = get_real(v, key);
        else if (key == "r_min") cfg.params.r_min = get_real(v, key);
        else if (key == "r_max") cfg.params.r_max = get_real(v, key);
        else if (key == "cube_side") cfg.params.cube_side = get_real(v, key);
        else if (key == "renorm_threshold") cfg.params.renorm_threshold = get_real(v, key);
        else if (key == "collision_floor") cfg.params.collision_floor = get_real(v, key);
        else if (key == "renormalization") cfg.params.renormalization = renormalization_from_string(get_string(v, key));
        else if (key == "r_lo") cfg.box.r_lo = get_real(v, key);
        else if (key == "r_hi") cfg.box.r_hi = get_real(v, key);
        else if (key == "v_lo") cfg.box.v_lo = get_real(v, key);
        else if (key == "v_hi") cfg.box.v_hi = get_real(v, key);
        else if (key == "transient_efolds") cfg.run.transient_efolds = get_real(v, key);
        else if (key == "horizon_periods") cfg.run.horizon_periods = get_real(v, key);
        else if (key == "bins_e") cfg.bins_e = get_count(v, key);
        else if (key == "bins_m") cfg.bins_m = get_count(v, key);
        else if (key == "e_min") e_min = v;
        else if (key == "e_max") e_max = v;
        else if (key == "m_min") m_min = v;
        else if (key == "m_max") m_max = v;
        else throw std::invalid_argument("unknown config key '" + key + "'");
    }
    if (e_min) set_bound(cfg.e_range, false, *e_min, "e_min");
    if (e_max) set_bound(cfg.e_range, true, *e_max, "e_max");
    if (m_min) set_bound(cfg.m_range, false, *m_min, "m_min");
    if (m_max) set_bound(cfg.m_range, true, *m_max, "m_max");
}

nlohmann::json config_to_json(const EnsembleConfig& cfg)
{
    return {
        {"n_points", cfg.n_points},
        {"seed", cfg.seed},
        {"workers", cfg.workers},
        {"m", cfg.params.m},
        {"e", cfg.params.e},
        {"epsilon", cfg.params.eps},
        {"h0", cfg.params.h0},
        {"r_min", cfg.params.r_min},
        {"r_max", cfg.params.r_max},
        {"cube_side", cfg.params.cube_side},
        {"renorm_threshold", cfg.params.renorm_threshold},
        {"collision_floor", cfg.params.collision_floor},
        {"renormalization", to_string(cfg.params.renormalization)},
        {"r_lo", cfg.box.r_lo},
        {"r_hi", cfg.box.r_hi},
        {"v_lo", cfg.box.v_lo},
        {"v_hi", cfg.box.v_hi},
        {"transient_efolds", cfg.run.transient_efolds},
        {"horizon_periods", cfg.run.horizon_periods},
        {"bins_e", cfg.bins_e},
        {"bins_m", cfg.bins_m},
        {"e_min", bound(cfg.e_range, false)},
        {"e_max", bound(cfg.e_range, true)},
        {"m_min", bound(cfg.m_range, false)},
        {"m_max", bound(cfg.m_range, true)},
    };
}

EnsembleConfig load_config_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("cannot parse config file " + path.string() + ": " + e.what());
    }
    EnsembleConfig cfg;
    apply_config_json(cfg, j);
    return cfg;
}

nlohmann::json make_manifest(const EnsembleConfig& cfg)
{
    return {
        {"code_version", HELIUM_VERSION},
        {"config", config_to_json(cfg)},
        {"record_header", std::string(kRecordHeader)},
    };
}

bool manifests_compatible(const nlohmann::json& a, const nlohmann::json& b)
{
    if (!a.contains("config") || !b.contains("config")) return false;
    nlohmann::json ca = a["config"];
    nlohmann::json cb = b["config"];
    ca.erase("workers");
    cb.erase("workers");
    return ca == cb && a.value("code_version", "") == b.value("code_version", "");
}

} // namespace helium
