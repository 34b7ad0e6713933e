#include <gtest/gtest.h>

#include "rotstar/config.hpp"
#include "rotstar/errors.hpp"
#include "rotstar/io.hpp"

using namespace rotstar;

TEST(Config, DefaultsRoundTrip) {
    EXPECT_EQ(merge_config(Json::object()), default_config());
}

TEST(Config, OverlayChangesOnlyGivenKeys) {
    const Json c = merge_config(Json::parse(R"({"eos": {"gamma0": 1.5}, "mu": 2.0})"));
    EXPECT_EQ(c["eos"]["gamma0"], 1.5);
    EXPECT_EQ(c["mu"], 2.0);
    EXPECT_EQ(c["eos"]["kind"], default_config()["eos"]["kind"]);
    EXPECT_DOUBLE_EQ(eos_from(c).gamma0(), 1.5);
}

TEST(Config, UnknownKeyRejected) {
    EXPECT_THROW(merge_config(Json::parse(R"({"eos": {"gama0": 1.5}})")), ConfigError);
    EXPECT_THROW(merge_config(Json::parse(R"({"bogus": 1})")), ConfigError);
}

TEST(Config, TypeMismatchRejected) {
    EXPECT_THROW(merge_config(Json::parse(R"({"mu": "big"})")), ConfigError);
    EXPECT_THROW(merge_config(Json::parse(R"({"grid": 3})")), ConfigError);
}

TEST(Config, BadEnumRejected) {
    EXPECT_THROW(merge_config(Json::parse(R"({"eos": {"kind": "stiff"}})")), ConfigError);
}

TEST(Io, Fnv1aVectors) {
    EXPECT_EQ(hex64(fnv1a64("")), "cbf29ce484222325");
    EXPECT_EQ(hex64(fnv1a64("a")), "af63dc4c8601ec8c");
    EXPECT_EQ(hex64(fnv1a64("foobar")), "85944171f73967e8");
}

TEST(Io, ErrorJson) {
    const auto j = error_json("config_error", "x", 2);
    EXPECT_EQ(j["error"], "config_error");
    EXPECT_EQ(j["exit_code"], 2);
}
