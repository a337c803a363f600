#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "robustmean/io.hpp"

using namespace robustmean;

TEST_CASE("csv rows become samples", "[io]") {
    std::istringstream in("1.5,2\n3,4.25\n-1,0\n");
    const SampleSet s = read_samples_csv(in);
    REQUIRE(s.size() == 3);
    REQUIRE(s.dim() == 2);
    REQUIRE(s[1] == Vec{3.0, 4.25});
}

TEST_CASE("a non-numeric first row is a header", "[io]") {
    std::istringstream in("x,y\n1,2\n3,4\n");
    const SampleSet s = read_samples_csv(in);
    REQUIRE(s.size() == 2);
    REQUIRE(s[0] == Vec{1.0, 2.0});
}

TEST_CASE("single-column csv works", "[io]") {
    std::istringstream in("1\n2\n3\n");
    const SampleSet s = read_samples_csv(in);
    REQUIRE(s.size() == 3);
    REQUIRE(s.dim() == 1);
}

TEST_CASE("ragged csv names the offending line", "[io]") {
    std::istringstream in("1,2\n3,4\n5\n");
    try {
        read_samples_csv(in);
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        REQUIRE(e.line == 3);
    }
}

TEST_CASE("bad csv numbers name the offending line", "[io]") {
    std::istringstream in("1,2\n3,oops\n");
    try {
        read_samples_csv(in);
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        REQUIRE(e.line == 2);
    }
}

TEST_CASE("header-only or empty csv is rejected", "[io]") {
    std::istringstream header_only("x,y\n");
    REQUIRE_THROWS_AS(read_samples_csv(header_only), parse_error);
    std::istringstream empty("");
    REQUIRE_THROWS_AS(read_samples_csv(empty), parse_error);
}

TEST_CASE("jsonl arrays become samples", "[io]") {
    std::istringstream in("[1, 2]\n[3, 4]\n\n[5, 6]\n");
    const SampleSet s = read_samples_jsonl(in);
    REQUIRE(s.size() == 3);
    REQUIRE(s[2] == Vec{5.0, 6.0});
}

TEST_CASE("ragged jsonl names the offending line", "[io]") {
    std::istringstream in("[1, 2]\n[3]\n");
    try {
        read_samples_jsonl(in);
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        REQUIRE(e.line == 2);
    }
}

TEST_CASE("non-array and non-numeric jsonl lines are rejected", "[io]") {
    std::istringstream obj("{\"a\": 1}\n");
    try {
        read_samples_jsonl(obj);
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        REQUIRE(e.line == 1);
    }
    std::istringstream strings("[\"a\"]\n");
    REQUIRE_THROWS_AS(read_samples_jsonl(strings), parse_error);
    std::istringstream garbage("[1, 2\n");
    REQUIRE_THROWS_AS(read_samples_jsonl(garbage), parse_error);
}

TEST_CASE("parse_double is strict about trailing junk", "[io]") {
    double v = 0.0;
    REQUIRE(parse_double("  3.5 ", v));
    REQUIRE(v == 3.5);
    REQUIRE(parse_double("-1e-3", v));
    REQUIRE_FALSE(parse_double("3.5x", v));
    REQUIRE_FALSE(parse_double("", v));
    REQUIRE_FALSE(parse_double("nanx", v));
}
