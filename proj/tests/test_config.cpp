#include <gtest/gtest.h>

#include <string>

#include "cevlab/config.hpp"

using namespace cevlab;

namespace {

const char* kCheckFile =
    "# standard config\n"
    "k=1\n"
    "l=1\n"
    "sigma=1\n"
    "a=0.75\n"
    "x0=1\n"
    "t_end=1\n"
    "n_steps=64\n"
    "experiment=check\n";

template <typename E>
std::string message_of(const std::string& text, const std::vector<Override>& overrides = {}) {
    try {
        (void)parse_config(text, overrides);
    } catch (const E& e) {
        return e.what();
    }
    return "<no error>";
}

}  // namespace

TEST(ParseConfig, EchoesValues) {
    const auto cfg = parse_config(kCheckFile);
    EXPECT_EQ(cfg.model.k, 1.0);
    EXPECT_EQ(cfg.model.l, 1.0);
    EXPECT_EQ(cfg.model.sigma, 1.0);
    EXPECT_EQ(cfg.model.a, 0.75);
    EXPECT_EQ(cfg.model.x0, 1.0);
    EXPECT_EQ(cfg.t_end, 1.0);
    EXPECT_EQ(cfg.n_steps, 64u);
    EXPECT_EQ(cfg.experiment, Experiment::Check);
    EXPECT_EQ(cfg.format, OutputFormat::Csv);
    EXPECT_EQ(cfg.resolved_output_path(), "cevlab-check.csv");
}

TEST(ParseConfig, SectionedKeysCommentsAndWhitespace) {
    const auto cfg = parse_config(
        "model.k = 2   # speed\n\r\n"
        "  model.l=0.5\n model.sigma=0.3\nmodel.a=0.6\nmodel.x0=0.2\r\n"
        "experiment = convergence\nexperiment.test_exponents=3..5\nref_exponent=9\nn_paths=2000\n"
        "seed=18446744073709551615\noutput.format=json\n");
    EXPECT_EQ(cfg.model.k, 2.0);
    EXPECT_EQ(cfg.test_exponents, (std::vector<int>{3, 4, 5}));
    EXPECT_EQ(cfg.ref_exponent, 9);
    EXPECT_EQ(cfg.seed, 18446744073709551615ull);
    EXPECT_EQ(cfg.format, OutputFormat::Json);
}

TEST(ParseConfig, FlagsOverrideFile) {
    const auto cfg = parse_config(kCheckFile, {{"model.k", "2.5"}, {"grid.n_steps", "10"}, {"out", "x.csv"},
                                               {"experiment", "simulate"}, {"experiment.scheme", "euler_naive"},
                                               {"n_paths", "3"}});
    EXPECT_EQ(cfg.model.k, 2.5);
    EXPECT_EQ(cfg.n_steps, 10u);
    EXPECT_EQ(cfg.output_path, "x.csv");
    EXPECT_EQ(cfg.experiment, Experiment::Simulate);
    EXPECT_EQ(cfg.scheme, SchemeId::EulerNaive);
}

TEST(ParseConfig, ExponentList) {
    const auto cfg = parse_config(std::string(kCheckFile) + "test_exponents=4, 6,8\n");
    EXPECT_EQ(cfg.test_exponents, (std::vector<int>{4, 6, 8}));
}

TEST(ParseConfig, InvalidExponentValidation) {
    std::string base = kCheckFile;
    base.replace(base.find("experiment=check"), 16, "experiment=convergence");
    EXPECT_NE(message_of<ValidationError>(base + "test_exponents=4,4\n").find("ascending"), std::string::npos);
    EXPECT_NE(message_of<ValidationError>(base + "test_exponents=4..9\nref_exponent=11\n").find("ref_exponent"),
              std::string::npos);
    EXPECT_NE(message_of<ValidationError>(base + "test_exponents=0..4\nref_exponent=8\n").find("e=0"),
              std::string::npos);
    EXPECT_NE(message_of<ValidationError>(base + "n_paths=10\n").find("n_paths"), std::string::npos);
}

TEST(ParseConfig, InvariantViolationNamesExponent) {
    const auto msg = message_of<ValidationError>(kCheckFile, {{"a", "1.2"}});
    EXPECT_NE(msg.find("a must lie in (0.5, 1)"), std::string::npos) << msg;
}

TEST(ParseConfig, MissingKey) {
    std::string text = kCheckFile;
    text.erase(text.find("sigma=1\n"), 8);
    EXPECT_EQ(message_of<ParseError>(text), "missing key: sigma");
}

TEST(ParseConfig, SyntaxErrorsNameTheirSource) {
    EXPECT_NE(message_of<ParseError>(std::string(kCheckFile) + "oops\n").find("line 10"), std::string::npos);
    EXPECT_NE(message_of<ParseError>(std::string(kCheckFile) + "colour=red\n").find("unknown key 'colour'"),
              std::string::npos);
    EXPECT_NE(message_of<ParseError>(std::string(kCheckFile) + "k=2\n").find("duplicate"), std::string::npos);
    EXPECT_NE(message_of<ParseError>(kCheckFile, {{"model.sigma", "inf"}}).find("flag --model.sigma"),
              std::string::npos);
    EXPECT_NE(message_of<ParseError>(kCheckFile, {{"model.sigma", "nan"}}).find("finite"), std::string::npos);
    EXPECT_NE(message_of<ParseError>(kCheckFile, {{"n_steps", "1.5"}}).find("integer"), std::string::npos);
    EXPECT_NE(message_of<ParseError>(kCheckFile, {{"scheme", "milstein"}}).find("unknown scheme"), std::string::npos);
    EXPECT_NE(message_of<ParseError>(kCheckFile, {{"experiment", "plot"}}).find("unknown experiment"),
              std::string::npos);
    EXPECT_NE(message_of<ParseError>(kCheckFile, {{"format", "xml"}}).find("csv or json"), std::string::npos);
}

TEST(ParseConfig, AssumptionAPrecheckForSemiDiscrete) {
    // dt = 1 exceeds 2/2.75 for the standard model.
    const auto msg = message_of<ValidationError>(kCheckFile, {{"experiment", "simulate"}, {"n_steps", "1"}});
    EXPECT_NE(msg.find("Assumption A"), std::string::npos) << msg;
    // Euler baselines and the feasibility check itself are exempt.
    EXPECT_NO_THROW((void)parse_config(kCheckFile, {{"experiment", "simulate"}, {"n_steps", "1"}, {"scheme", "euler_naive"}}));
    EXPECT_NO_THROW((void)parse_config(kCheckFile, {{"n_steps", "1"}}));
}

TEST(ParseConfig, ResolvedTextRoundTrips) {
    const auto cfg = parse_config(kCheckFile, {{"model.sigma", "0.1"}, {"a", "0.7000000000000001"},
                                               {"strike", "1.2345678901234567"}, {"experiment", "price"}});
    const auto again = parse_config(to_config_text(cfg));
    EXPECT_EQ(again.resolved(), cfg.resolved());
    EXPECT_EQ(again.model.a, 0.7000000000000001);
    EXPECT_EQ(again.payoff.strike, 1.2345678901234567);
}

TEST(ParseConfig, ReadsProvenanceFromJsonReport) {
    const auto cfg = parse_config(kCheckFile, {{"sigma", "0.3"}});
    std::string json = "{\"experiment\":\"check\",\"provenance\":{\"config\":{";
    bool first = true;
    for (const auto& [k, v] : cfg.resolved()) {
        json += (first ? "" : ",") + std::string("\"") + k + "\":\"" + v + "\"";
        first = false;
    }
    json += "}}}";
    EXPECT_EQ(parse_config(json).resolved(), cfg.resolved());
    EXPECT_THROW((void)parse_config("{\"result\": 1}"), ParseError);
    EXPECT_THROW((void)parse_config("{not json"), ParseError);
}
