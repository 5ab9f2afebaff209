#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "support.hpp"
#include "uranex/flowsheet.hpp"

using namespace uranex;
using nlohmann::json;

namespace {

json reference_json()
{
    json j;
    to_json(j, test::reference());
    return j;
}

}  // namespace

TEST(Flowsheet, LoadsReferenceConfig)
{
    EXPECT_EQ(test::reference().n_stages, 16);
    EXPECT_EQ(test::reference().feed_stage, 8);
    EXPECT_EQ(test::reference().state_size(), 96);
}

TEST(Flowsheet, JsonRoundTrip)
{
    const FlowSheet back = parse_flowsheet(reference_json());
    json a;
    json b;
    to_json(a, test::reference());
    to_json(b, back);
    EXPECT_EQ(a, b);
}

TEST(Flowsheet, RejectsFeedStageZero)
{
    auto j = reference_json();
    j["feed_stage"] = 0;
    EXPECT_THROW(parse_flowsheet(j), ConfigError);
}

TEST(Flowsheet, RejectsInvertedInputBox)
{
    auto j = reference_json();
    j["u_min"] = 90.0;
    EXPECT_THROW(parse_flowsheet(j), ConfigError);
}

TEST(Flowsheet, ErrorNamesField)
{
    auto j = reference_json();
    j["raffinate_tol"] = 0.0;
    try {
        parse_flowsheet(j);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("raffinate_tol"), std::string::npos);
    }
}

TEST(Flowsheet, RejectsUnknownAndMissingKeys)
{
    auto extra = reference_json();
    extra["V_mixer"] = 1.0;
    EXPECT_THROW(parse_flowsheet(extra), ConfigError);
    auto missing = reference_json();
    missing.erase("K_U");
    EXPECT_THROW(parse_flowsheet(missing), ConfigError);
}

TEST(Flowsheet, RejectsBadRateWindowAndStages)
{
    auto j = reference_json();
    j["du_min"] = 1.0;
    EXPECT_THROW(parse_flowsheet(j), ConfigError);
    j = reference_json();
    j["feed_stage"] = 16;
    EXPECT_THROW(parse_flowsheet(j), ConfigError);
    j = reference_json();
    j["n_stages"] = 1;
    EXPECT_THROW(parse_flowsheet(j), ConfigError);
}

TEST(Flowsheet, MalformedFileIsConfigError)
{
    const auto path = std::filesystem::temp_directory_path() / "uranex_bad_flowsheet.json";
    std::ofstream(path) << "{ \"n_stages\": 16, ";
    EXPECT_THROW(load_flowsheet(path), ConfigError);
    EXPECT_THROW(load_flowsheet(path.string() + ".missing"), ConfigError);
    std::filesystem::remove(path);
}

TEST(StageFlows, NoFeedGivesUniformAqueousFlow)
{
    const auto& fs = test::reference();
    const auto sf = stage_flows(fs, 0.0, fs.O_E_nominal);
    for (double a : sf.aqueous) {
        EXPECT_EQ(a, fs.A_E);
    }
}

TEST(StageFlows, FeedStageSplit)
{
    const auto& fs = test::reference();
    const auto sf = stage_flows(fs, fs.A_F_nominal, fs.O_E_nominal);
    EXPECT_DOUBLE_EQ(sf.aqueous[7], fs.A_E + fs.A_F_nominal);
    EXPECT_DOUBLE_EQ(sf.aqueous[8], fs.A_E);
    EXPECT_EQ(sf.feed_index, 7);
    for (int n = 0; n < fs.n_stages; ++n) {
        EXPECT_NEAR(sf.mixer_aqueous[n] + sf.mixer_organic[n], fs.V_mixer_total, 1e-12);
        EXPECT_DOUBLE_EQ(sf.organic[n], fs.O_E_nominal);
        EXPECT_NEAR(sf.mixer_aqueous[n] / sf.mixer_organic[n], sf.aqueous[n] / sf.organic[n], 1e-12);
    }
}

TEST(StageFlows, CountercurrentChain)
{
    const auto& fs = test::reference();
    const auto sf = stage_flows(fs, fs.A_F_nominal, fs.O_E_nominal);
    const int n = fs.n_stages;
    EXPECT_EQ(sf.aqueous_source[n - 1], -1);
    EXPECT_EQ(sf.organic_source[0], -1);
    for (int j = 0; j + 1 < n; ++j) {
        EXPECT_EQ(sf.aqueous_source[j], j + 1);
        EXPECT_EQ(sf.organic_source[j + 1], j);
    }
}

TEST(StageFlows, MixerSplitMonotoneInFeed)
{
    const auto& fs = test::reference();
    const auto lo = stage_flows(fs, 10.0, fs.O_E_nominal);
    const auto hi = stage_flows(fs, 40.0, fs.O_E_nominal);
    for (int j = 0; j < fs.feed_stage; ++j) {
        EXPECT_GT(hi.mixer_aqueous[j], lo.mixer_aqueous[j]);
        EXPECT_LT(hi.mixer_organic[j], lo.mixer_organic[j]);
    }
}

TEST(StageFlows, RejectsNonPositiveSolvent)
{
    EXPECT_THROW(stage_flows(test::reference(), 10.0, 0.0), std::invalid_argument);
}
