#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "bks/catalog.hpp"
#include "bks/io.hpp"

using namespace bks;

TEST_CASE("fingerprint is stable and content-sensitive") {
    auto a = catalog::get("P-24").instance;
    auto b = catalog::get("P-24").instance;
    CHECK(fingerprint(a) == fingerprint(b));
    CHECK(fingerprint(a) != fingerprint(catalog::get("K-20").instance));
}

TEST_CASE("serialize/parse round trip is the identity") {
    for (const char* nm : {"P-24", "Pen-40", "MP-57"}) {
        CAPTURE(nm);
        auto doc = catalog::get(nm);
        auto j = serialize_ks_document(doc.instance, doc.metadata);
        auto again = parse_ks_document(j);
        CHECK(fingerprint(again.instance) == fingerprint(doc.instance));
        auto j2 = serialize_ks_document(again.instance, again.metadata);
        CHECK(j == j2);
    }
}

TEST_CASE("catalog files carry matching checksums") {
    for (const auto& nm : catalog::names()) {
        CAPTURE(nm);
        auto doc = catalog::get(nm);   // get() already verifies; double check here
        CHECK(doc.checksum == fingerprint(doc.instance));
    }
}

TEST_CASE("parse rejects malformed documents") {
    ordered_json base = serialize_ks_document(catalog::get("CEG-18").instance);
    {
        ordered_json j = base;
        j["format"] = "nope/9";
        CHECK_THROWS(parse_ks_document(j));
    }
    {
        ordered_json j = base;
        j["vectors"][0]["coords"][0] = "1/0";
        CHECK_THROWS(parse_ks_document(j));
    }
    {
        ordered_json j = base;
        j["orthogonality"] = ordered_json::array({{0, 1}});   // contradicts coordinates
        CHECK_THROWS(parse_ks_document(j));
    }
    {
        ordered_json j = base;
        j["bases"][0]["members"] = {0, 1, 2};   // wrong arity for d=4
        CHECK_THROWS(parse_ks_document(j));
    }
}

TEST_CASE("expected metadata survives a file round trip") {
    auto doc = catalog::get("S-29");
    REQUIRE(doc.expected.optimal_sizes.has_value());
    CHECK(*doc.expected.optimal_sizes == std::pair<int, int>{6, 9});
    CHECK(*doc.expected.capable_total == 13251);
    CHECK(*doc.expected.essential_total == 187);
    CHECK(doc.expected.iso_capable.at(5) == 1);
    CHECK(doc.expected.iso_essential.at(8) == 57);
    REQUIRE(doc.expected.reference_sa.has_value());
    CHECK(*doc.expected.reference_sa == std::vector<int>{5, 6, 9, 10, 13, 14});
}

TEST_CASE("report envelope separates payload from timing") {
    auto inst = catalog::get("CEG-18").instance;
    auto r1 = make_report("census CEG-18 --jobs 1", inst, {{"x", 1}}, 10.0);
    auto r2 = make_report("census CEG-18 --jobs 8", inst, {{"x", 1}}, 99.0);
    CHECK(r1["payload"] == r2["payload"]);
    CHECK(r1["instance"]["fingerprint"] == r2["instance"]["fingerprint"]);
    CHECK(r1["command"] != r2["command"]);
}

TEST_CASE("abstract documents round trip their edge lists") {
    auto pen = catalog::get("Pen-40");
    auto j = serialize_ks_document(pen.instance);
    auto again = parse_ks_document(j);
    CHECK_FALSE(again.instance.coordinate_backed());
    for (int a = 0; a < pen.instance.n(); ++a)
        CHECK(again.instance.adjacency(a) == pen.instance.adjacency(a));
}
