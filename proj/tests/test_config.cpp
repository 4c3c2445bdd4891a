#include "doctest.h"

#include "sohkan/config.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

using namespace sohkan;

TEST_CASE("parsing trims keys, values and comments") {
    const Config config = Config::parse("# a comment\n"
                                        "  tau_s = 10.5  \n"
                                        "\n"
                                        "name= bench rig \n"
                                        "cycles =997\n",
                                        "inline");
    CHECK(config.has("tau_s"));
    CHECK(config.get_double("tau_s", 0.0) == doctest::Approx(10.5));
    CHECK(config.get_string("name", "") == "bench rig");
    CHECK(config.get_int("cycles", 0) == 997);
    CHECK_FALSE(config.has("missing"));
    CHECK(config.values().size() == 3);
}

TEST_CASE("parse errors carry the origin and line number") {
    try {
        (void)Config::parse("good = 1\nthis line has no equals\n", "settings.cfg");
        FAIL("expected a parse error");
    } catch (const std::runtime_error& e) {
        const std::string what = e.what();
        CHECK(what.find("settings.cfg") != std::string::npos);
        CHECK(what.find("2") != std::string::npos);
    }

    CHECK_THROWS_AS((void)Config::parse("a = 1\na = 2\n", "dup.cfg"), std::runtime_error);
    CHECK_THROWS_AS((void)Config::parse(" = 3\n", "blank.cfg"), std::runtime_error);
}

TEST_CASE("typed getters fall back and validate") {
    Config config = Config::parse("rate = 0.25\ncount = 12\nbig = 18446744073709551615\n"
                                  "flag_on = yes\nflag_off = 0\nword = hello\n",
                                  "inline");

    CHECK(config.get_double("rate", 9.0) == doctest::Approx(0.25));
    CHECK(config.get_double("absent", 9.0) == doctest::Approx(9.0));
    CHECK(config.get_int("count", -1) == 12);
    CHECK(config.get_u64("big", 0) == 18446744073709551615ull);
    CHECK(config.get_bool("flag_on", false));
    CHECK_FALSE(config.get_bool("flag_off", true));
    CHECK(config.get_bool("absent", true));
    CHECK(config.get_string("word", "x") == "hello");

    CHECK_THROWS_AS((void)config.get_double("word", 0.0), std::runtime_error);
    CHECK_THROWS_AS((void)config.get_int("rate", 0), std::runtime_error);
    CHECK_THROWS_AS((void)config.get_bool("word", false), std::runtime_error);
}

TEST_CASE("boolean spellings") {
    const Config config = Config::parse("a = true\nb = TRUE\nc = on\nd = 1\n"
                                        "e = false\nf = Off\ng = no\nh = 0\n",
                                        "inline");
    for (const char* key : {"a", "b", "c", "d"}) CHECK(config.get_bool(key, false));
    for (const char* key : {"e", "f", "g", "h"}) CHECK_FALSE(config.get_bool(key, true));
}

TEST_CASE("set overrides parsed values") {
    Config config = Config::parse("steps = 400\n", "inline");
    config.set("steps", "25");
    CHECK(config.get_int("steps", 0) == 25);
    config.set("fresh", "1.5");
    CHECK(config.get_double("fresh", 0.0) == doctest::Approx(1.5));
}

TEST_CASE("file loading") {
    const std::string path = "tmp_config_test.cfg";
    {
        std::ofstream file(path);
        file << "# comment\nsteps = 7\n";
    }
    const Config config = Config::load(path);
    CHECK(config.get_int("steps", 0) == 7);
    std::remove(path.c_str());

    CHECK_THROWS_AS((void)Config::load("tmp_config_missing.cfg"), std::runtime_error);
}
