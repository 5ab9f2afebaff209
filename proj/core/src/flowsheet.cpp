#include "uranex/flowsheet.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <string_view>

#include <nlohmann/json.hpp>

namespace uranex {

namespace {

void require(bool ok, std::string_view field, std::string_view what)
{
    if (!ok) {
        throw ConfigError("flowsheet." + std::string(field) + ": " + std::string(what));
    }
}

void require_positive(double v, std::string_view field)
{
    require(std::isfinite(v) && v > 0.0, field, "must be finite and > 0");
}

void require_nonnegative(double v, std::string_view field)
{
    require(std::isfinite(v) && v >= 0.0, field, "must be finite and >= 0");
}

// Field table shared by to_json/from_json so that the schema lives in one place.
template <class Fn>
void for_each_real_field(FlowSheet& fs, Fn&& fn)
{
    fn("A_E", fs.A_E);
    fn("O_E_nominal", fs.O_E_nominal);
    fn("A_F_nominal", fs.A_F_nominal);
    fn("U_feed", fs.U_feed);
    fn("H_feed", fs.H_feed);
    fn("H_scrub", fs.H_scrub);
    fn("U_solvent_in", fs.U_solvent_in);
    fn("H_solvent_in", fs.H_solvent_in);
    fn("TBP_total", fs.TBP_total);
    fn("K_U", fs.K_U);
    fn("K_H", fs.K_H);
    fn("V_mixer_total", fs.V_mixer_total);
    fn("V_settler_aq", fs.V_settler_aq);
    fn("V_settler_og", fs.V_settler_og);
    fn("u_min", fs.u_min);
    fn("u_max", fs.u_max);
    fn("du_min", fs.du_min);
    fn("du_max", fs.du_max);
    fn("raffinate_tol", fs.raffinate_tol);
}

}  // namespace

void FlowSheet::validate() const
{
    require(n_stages >= 2, "n_stages", "must be >= 2");
    require(feed_stage >= 1 && feed_stage < n_stages, "feed_stage", "must lie in [1, n_stages)");

    require_positive(A_E, "A_E");
    require_positive(O_E_nominal, "O_E_nominal");
    require_positive(A_F_nominal, "A_F_nominal");
    require_positive(U_feed, "U_feed");
    require_positive(H_feed, "H_feed");
    require_positive(H_scrub, "H_scrub");
    require_nonnegative(U_solvent_in, "U_solvent_in");
    require_nonnegative(H_solvent_in, "H_solvent_in");
    require_positive(TBP_total, "TBP_total");
    require_positive(K_U, "K_U");
    require_positive(K_H, "K_H");
    require_positive(V_mixer_total, "V_mixer_total");
    require_positive(V_settler_aq, "V_settler_aq");
    require_positive(V_settler_og, "V_settler_og");

    require_nonnegative(u_min, "u_min");
    require(std::isfinite(u_max) && u_min < u_max, "u_max", "must be finite and > u_min");
    require(std::isfinite(du_min) && du_min < 0.0, "du_min", "must be < 0");
    require(std::isfinite(du_max) && du_max > 0.0, "du_max", "must be > 0");
    require_positive(raffinate_tol, "raffinate_tol");
}

void to_json(nlohmann::json& j, const FlowSheet& fs)
{
    j = nlohmann::json::object();
    j["n_stages"] = fs.n_stages;
    j["feed_stage"] = fs.feed_stage;
    auto copy = fs;
    for_each_real_field(copy, [&](const char* key, double& v) { j[key] = v; });
}

void from_json(const nlohmann::json& j, FlowSheet& fs)
{
    if (!j.is_object()) {
        throw ConfigError("flowsheet: top-level value must be a JSON object");
    }
    std::set<std::string> known{"n_stages", "feed_stage"};
    for_each_real_field(fs, [&](const char* key, double&) { known.insert(key); });
    for (const auto& [key, _] : j.items()) {
        if (!known.contains(key)) {
            throw ConfigError("flowsheet: unknown key '" + key + "'");
        }
    }

    auto fetch = [&](const std::string& key) -> const nlohmann::json& {
        auto it = j.find(key);
        if (it == j.end()) {
            throw ConfigError("flowsheet." + key + ": missing");
        }
        return *it;
    };
    auto integer = [&](const std::string& key) {
        const auto& v = fetch(key);
        if (!v.is_number_integer()) {
            throw ConfigError("flowsheet." + key + ": must be an integer");
        }
        return v.get<int>();
    };

    fs.n_stages = integer("n_stages");
    fs.feed_stage = integer("feed_stage");
    for_each_real_field(fs, [&](const char* key, double& v) {
        const auto& node = fetch(key);
        if (!node.is_number()) {
            throw ConfigError(std::string("flowsheet.") + key + ": must be a number");
        }
        v = node.get<double>();
    });
}

FlowSheet parse_flowsheet(const nlohmann::json& doc)
{
    FlowSheet fs = doc.get<FlowSheet>();
    fs.validate();
    return fs;
}

FlowSheet load_flowsheet(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open flowsheet file '" + path.string() + "'");
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("flowsheet parse error in '" + path.string() + "': " + e.what());
    }
    return parse_flowsheet(doc);
}

StageFlows stage_flows(const FlowSheet& fs, double A_F, double O_E)
{
    if (!(A_F >= 0.0) || !(O_E > 0.0)) {
        throw std::invalid_argument("stage_flows: requires A_F >= 0 and O_E > 0");
    }
    const auto n = static_cast<std::size_t>(fs.n_stages);
    StageFlows sf;
    sf.feed_index = fs.feed_stage - 1;
    sf.aqueous.resize(n);
    sf.organic.assign(n, O_E);
    sf.mixer_aqueous.resize(n);
    sf.mixer_organic.resize(n);
    sf.aqueous_source.resize(n);
    sf.organic_source.resize(n);

    for (std::size_t j = 0; j < n; ++j) {
        const auto stage = static_cast<int>(j);
        sf.aqueous[j] = fs.A_E + (stage <= sf.feed_index ? A_F : 0.0);
        const double share = sf.aqueous[j] / (sf.aqueous[j] + O_E);
        sf.mixer_aqueous[j] = fs.V_mixer_total * share;
        sf.mixer_organic[j] = fs.V_mixer_total - sf.mixer_aqueous[j];
        sf.aqueous_source[j] = stage + 1 < fs.n_stages ? stage + 1 : -1;
        sf.organic_source[j] = stage - 1;
    }
    return sf;
}

}  // namespace uranex
