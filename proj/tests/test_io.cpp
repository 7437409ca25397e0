#include <catch_amalgamated.hpp>

#include <cstdio>
#include <string>

#include "oracles.hpp"
#include "superflip/io.hpp"

using namespace superflip;

TEST_CASE("Grassmann JSON round trip", "[io]")
{
    oracle::Rng rng(211);
    for (int k = 0; k < 100; ++k) {
        int n = 1 + rng.pick(5);
        Grassmann g = oracle::random_element(rng, n, rng.uniform(-2, 2), 0.5, rng.pick(2));
        Grassmann back = grassmann_from_json(json::parse(to_json(g).dump()));
        CHECK(back.n() == g.n());
        CHECK((back - g).norm() == 0.0);
    }
    CHECK(grassmann_from_json(json(2.5)).body() == 2.5);
    CHECK(grassmann_from_json(json(2.5), 3).n() == 3);
}

TEST_CASE("malformed Grassmann JSON is rejected", "[io]")
{
    CHECK_THROWS_AS(grassmann_from_json(json::parse(R"({"N":2,"terms":[{"idx":[2,1],"c":1}]})")), FormatError);
    CHECK_THROWS_AS(grassmann_from_json(json::parse(R"({"N":2,"terms":[{"idx":[3],"c":1}]})")), FormatError);
    CHECK_THROWS_AS(grassmann_from_json(json::parse(R"({"terms":[{"idx":[1],"c":1}]})")), FormatError);
    CHECK_THROWS_AS(grassmann_from_json(json::parse(R"("x")")), FormatError);
}

TEST_CASE("state JSON round trip", "[io]")
{
    oracle::Rng rng(223);
    for (int k = 0; k < 100; ++k) {
        TorusState s = oracle::random_state(rng, 2 + rng.pick(3), 0.2);
        s.frame = rng.pick(2);
        TorusState t = state_from_json(json::parse(dump(to_json(s))));
        for (int i = 0; i < 3; ++i)
            CHECK((t.lam(i) - s.lam(i)).norm() == 0.0);
        CHECK((t.sigma - s.sigma).norm() == 0.0);
        CHECK((t.theta - s.theta).norm() == 0.0);
        CHECK(t.spin == s.spin);
        CHECK(t.frame == s.frame);
    }
    TorusState c = state_from_json(json::parse(R"({"a":1,"b":1,"c":1})"));
    CHECK(c.sigma.is_zero());
    CHECK(c.spin == std::array<int, 3>{1, 1, 1});
    CHECK_THROWS(state_from_json(json::parse(R"({"a":-1,"b":1,"c":1})")));
    CHECK_THROWS(state_from_json(json::parse(R"([1,2,3])")));
}

TEST_CASE("file errors carry the path and position", "[io]")
{
    std::string path = "test_io_bad.json";
    write_text(path, "{\n  \"a\": 1,\n  \"b\": ,\n}\n");
    try {
        read_state(path);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        std::string msg = e.what();
        CHECK(msg.find(path) != std::string::npos);
        CHECK(msg.find("line 3") != std::string::npos);
    }
    std::remove(path.c_str());
    CHECK_THROWS_AS(read_state("no_such_file.json"), FormatError);
}

TEST_CASE("region CSV", "[io]")
{
    IdentityReport rep = verify_identity(make_state(1, 1, 1, Grassmann(), Grassmann()), cutoff_from_length(8), 1e-2);
    std::string csv = identity_csv(rep);
    CHECK(csv.rfind(region_csv_header(true), 0) == 0);
    std::size_t lines = 0;
    for (char ch : csv)
        lines += ch == '\n';
    CHECK(lines == rep.rows.size() + 1);
    CHECK(fmt_real(0.1) == "0.10000000000000001");
    json j = to_json(rep);
    CHECK(j.contains("deviation"));
}
