#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstring>
#include <filesystem>
#include <string>

#include "smoothnet/smoothnet.h"

namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& leaf) {
    const fs::path dir = fs::temp_directory_path() / "smoothnet_capi_test" / leaf;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// takes ownership of the C string
std::string take(char* text) {
    REQUIRE(text != nullptr);
    std::string out(text);
    smoothnet_string_free(text);
    return out;
}

} // namespace

TEST_CASE("status names") {
    CHECK(std::strcmp(smoothnet_status_name(SMOOTHNET_OK), "ok") == 0);
    CHECK(std::strcmp(smoothnet_status_name(SMOOTHNET_INVALID_ARGUMENT), "invalid argument") == 0);
    CHECK(std::strcmp(smoothnet_status_name(SMOOTHNET_NUMERIC), "numeric") == 0);
}

TEST_CASE("spec lifecycle and field access") {
    smoothnet_spec* spec = nullptr;
    REQUIRE(smoothnet_spec_create(&spec) == SMOOTHNET_OK);
    CHECK(smoothnet_spec_set_string(spec, "function", "sin15") == SMOOTHNET_OK);
    CHECK(smoothnet_spec_set_string(spec, "mode", "train") == SMOOTHNET_OK);
    CHECK(smoothnet_spec_set_number(spec, "theta", 4) == SMOOTHNET_OK);
    CHECK(smoothnet_spec_set_number(spec, "gamma3", 0.05) == SMOOTHNET_OK);

    CHECK(smoothnet_spec_set_string(spec, "flavor", "grape") == SMOOTHNET_INVALID_ARGUMENT);
    CHECK(std::string(smoothnet_last_error()).find("flavor") != std::string::npos);
    CHECK(smoothnet_spec_set_number(spec, "momentum", 0.9) == SMOOTHNET_INVALID_ARGUMENT);
    CHECK(smoothnet_spec_set_string(spec, "mode", "dance") == SMOOTHNET_INVALID_ARGUMENT);

    char* text = nullptr;
    REQUIRE(smoothnet_spec_format(spec, &text) == SMOOTHNET_OK);
    const std::string json = take(text);
    CHECK(json.find("\"sin15\"") != std::string::npos);
    CHECK(json.find("\"train\"") != std::string::npos);

    // the document form parses back
    smoothnet_spec* again = nullptr;
    REQUIRE(smoothnet_spec_parse(json.c_str(), &again) == SMOOTHNET_OK);
    char* text2 = nullptr;
    REQUIRE(smoothnet_spec_format(again, &text2) == SMOOTHNET_OK);
    CHECK(take(text2) == json);
    smoothnet_spec_destroy(again);
    smoothnet_spec_destroy(spec);

    CHECK(smoothnet_spec_parse("{\"nope\":1}", &again) == SMOOTHNET_INVALID_ARGUMENT);
    CHECK(smoothnet_spec_parse(nullptr, &again) == SMOOTHNET_INVALID_ARGUMENT);
    CHECK(smoothnet_spec_create(nullptr) == SMOOTHNET_INVALID_ARGUMENT);
}

TEST_CASE("expressions through the C surface") {
    int dim = 0;
    CHECK(smoothnet_expression_check("x^3+3", &dim) == SMOOTHNET_OK);
    CHECK(dim == 1);
    CHECK(smoothnet_expression_check("16*(x^3+y^3)+3", &dim) == SMOOTHNET_OK);
    CHECK(dim == 2);
    CHECK(smoothnet_expression_check("tan(x)", &dim) == SMOOTHNET_INVALID_ARGUMENT);
    CHECK(std::string(smoothnet_last_error()).find("position") != std::string::npos);

    double value = 0.0;
    const double x1[] = {1.0};
    CHECK(smoothnet_expression_eval("x^3+3", x1, 1, &value) == SMOOTHNET_OK);
    CHECK(value == 4.0);
    const double x2[] = {0.5, 0.5};
    CHECK(smoothnet_expression_eval("16*(x^3+y^3)+3", x2, 2, &value) == SMOOTHNET_OK);
    CHECK(value == 7.0);
    CHECK(smoothnet_expression_eval("x^3+3", x2, 2, &value) == SMOOTHNET_INVALID_ARGUMENT);
}

TEST_CASE("runs and summaries") {
    smoothnet_spec* spec = nullptr;
    REQUIRE(smoothnet_spec_create(&spec) == SMOOTHNET_OK);
    REQUIRE(smoothnet_spec_set_string(spec, "function", "cubic") == SMOOTHNET_OK);
    REQUIRE(smoothnet_spec_set_string(spec, "mode", "train") == SMOOTHNET_OK);
    REQUIRE(smoothnet_spec_set_number(spec, "grid_step", 0.1) == SMOOTHNET_OK);
    REQUIRE(smoothnet_spec_set_number(spec, "theta", 3) == SMOOTHNET_OK);
    REQUIRE(smoothnet_spec_set_number(spec, "steps", 40) == SMOOTHNET_OK);
    const uint64_t seeds[] = {1, 2};
    REQUIRE(smoothnet_spec_set_seeds(spec, seeds, 2) == SMOOTHNET_OK);

    const fs::path dir = fresh_dir("run");
    smoothnet_summary* summary = nullptr;
    REQUIRE(smoothnet_run(spec, dir.string().c_str(), &summary) == SMOOTHNET_OK);
    CHECK(smoothnet_summary_runs(summary) == 2);
    CHECK(smoothnet_summary_diverged(summary) == 0);
    CHECK(smoothnet_summary_failed(summary) == 0);
    char* text = nullptr;
    REQUIRE(smoothnet_summary_format(summary, &text) == SMOOTHNET_OK);
    CHECK(take(text).find("\"seeds\"") != std::string::npos);
    smoothnet_summary_destroy(summary);
    CHECK(fs::exists(dir / "seed_1" / "network.json"));

    smoothnet_summary* again = nullptr;
    REQUIRE(smoothnet_reaggregate(spec, dir.string().c_str(), &again) == SMOOTHNET_OK);
    CHECK(smoothnet_summary_runs(again) == 2);
    smoothnet_summary_destroy(again);

    // empty seed list violates the spec contract
    REQUIRE(smoothnet_spec_set_seeds(spec, nullptr, 0) == SMOOTHNET_OK);
    smoothnet_summary* bad = nullptr;
    CHECK(smoothnet_run(spec, dir.string().c_str(), &bad) == SMOOTHNET_INVALID_ARGUMENT);
    CHECK(std::string(smoothnet_last_error()).find("seed") != std::string::npos);
    smoothnet_spec_destroy(spec);
}

TEST_CASE("missing files surface as numeric runtime failures") {
    smoothnet_spec* spec = nullptr;
    REQUIRE(smoothnet_spec_create(&spec) == SMOOTHNET_OK);
    REQUIRE(smoothnet_spec_set_string(spec, "function", "cubic") == SMOOTHNET_OK);
    REQUIRE(smoothnet_spec_set_string(spec, "mode", "analyze") == SMOOTHNET_OK);
    REQUIRE(smoothnet_spec_set_string(spec, "network", "/nonexistent/net.json") == SMOOTHNET_OK);
    const fs::path dir = fresh_dir("missing");
    smoothnet_summary* summary = nullptr;
    // the run completes; the failure is recorded in the summary rather than
    // thrown, matching the partial-artifact contract
    REQUIRE(smoothnet_run(spec, dir.string().c_str(), &summary) == SMOOTHNET_OK);
    CHECK(smoothnet_summary_failed(summary) == 1);
    smoothnet_summary_destroy(summary);
    smoothnet_spec_destroy(spec);
}
