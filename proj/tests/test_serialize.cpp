#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "json.hpp"
#include "polyspline.hpp"
#include "serialize.hpp"

using namespace smoothnet;

namespace {

TwoLayerNet sample_net(unsigned seed, int dim = 1) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    TwoLayerNet net;
    for (int j = 0; j < 4; ++j) {
        NetUnit unit;
        for (int q = 0; q < dim; ++q) unit.w.push_back(u(gen));
        unit.b = u(gen);
        unit.lambda = u(gen);
        unit.kind = j % 2 ? ActivationKind::tanh_kind() : ActivationKind::logistic();
        net.units.push_back(std::move(unit));
    }
    net.output_bias = u(gen);
    return net;
}

} // namespace

TEST_CASE("network json round-trips bitwise") {
    TwoLayerNet net = sample_net(3);
    const std::string text = network_to_json(net);
    TwoLayerNet back = network_from_json(text);
    REQUIRE(back.units.size() == net.units.size());
    for (std::size_t j = 0; j < net.units.size(); ++j) {
        CHECK(back.units[j].w == net.units[j].w);
        CHECK(back.units[j].b == net.units[j].b);
        CHECK(back.units[j].lambda == net.units[j].lambda);
        CHECK(back.units[j].kind.tag == net.units[j].kind.tag);
    }
    CHECK(back.output_bias == net.output_bias);
    // the artifact is reproducible down to the byte
    CHECK(network_to_json(back) == text);
    CHECK(network_to_json(net) == text);
}

TEST_CASE("network json rejects what it cannot represent or read") {
    TwoLayerNet net = sample_net(4);
    net.units[0].kind =
        ActivationKind::custom("ramp", [](double x) { return x > 0 ? x : 0.0; }, 1);
    CHECK_THROWS_AS(network_to_json(net), std::invalid_argument);

    CHECK_THROWS_AS(network_from_json("not json at all"), std::invalid_argument);
    CHECK_THROWS_AS(network_from_json("{}"), std::invalid_argument);
    CHECK_THROWS_AS(network_from_json(R"({"units":[{"w":[],"b":0,"lambda":1,"kind":"logistic"}]})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(network_from_json(R"({"units":[{"w":[1],"lambda":1,"kind":"logistic"}]})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        network_from_json(R"({"units":[{"w":[1],"b":"zero","lambda":1,"kind":"logistic"}]})"),
        std::invalid_argument);
    CHECK_THROWS_AS(
        network_from_json(R"({"units":[{"w":[1],"b":0,"lambda":1,"kind":"softplus"}]})"),
        std::invalid_argument);
    // units disagreeing on input dimension
    CHECK_THROWS_AS(network_from_json(R"({"units":[
        {"w":[1],"b":0,"lambda":1,"kind":"logistic"},
        {"w":[1,2],"b":0,"lambda":1,"kind":"logistic"}],"output_bias":0})"),
                    std::invalid_argument);
}

TEST_CASE("analysis report json carries verdicts and positions") {
    NetUnit base{{2.0}, std::log(0.25 / 0.75) - 1.0, 0.0, ActivationKind::logistic()};
    TwoLayerNet net;
    net.units.push_back(sharpen(base, 0.5, 4096.0).unit);
    net.units[0].lambda = 1.3;
    net.units.push_back(NetUnit{{1.0}, -0.3, 0.0, ActivationKind::logistic()});
    Dataset d = tabulate([&](double x) { return net.eval(x); }, 0.01);
    AnalysisReport rep = analyze(net, d, Thresholds{});
    const std::string text = report_to_json(rep, net);
    CHECK(report_to_json(rep, net) == text);

    auto root = nlohmann::json::parse(text);
    CHECK(root["eps"].get<double>() == 0.0);
    CHECK(root["mode"] == "global");
    CHECK(root["exact_fit"] == true);
    CHECK(root["eps_used"].get<double>() > 0.0);
    REQUIRE(root["units"].size() == 2);
    CHECK(root["units"][0]["index"] == 0);
    CHECK(root["units"][0]["verdict"] == "Local");
    CHECK(root["units"][0]["z"].is_number());
    CHECK(std::fabs(root["units"][0]["z"].get<double>() - 0.5) <= 0.02);
    CHECK(root["units"][0]["line"].is_null());
    CHECK(root["units"][1]["verdict"] == "Inactivated");
    CHECK(root["units"][1]["z"].is_null());
}

TEST_CASE("two-input reports describe lines instead of points") {
    NetUnit steep{{8192.0, 0.0}, -8192.0 * 0.5 + std::log(0.25 / 0.75), 0.9,
                  ActivationKind::logistic()};
    TwoLayerNet net;
    net.units.push_back(steep);
    Dataset d = tabulate2([&](double x, double y) { return net.eval({x, y}); }, 0.1);
    AnalysisReport rep = analyze(net, d, Thresholds{});
    auto root = nlohmann::json::parse(report_to_json(rep, net));
    REQUIRE(root["units"].size() == 1);
    CHECK(root["units"][0]["z"].is_null());
    REQUIRE(root["units"][0]["line"].is_object());
    CHECK(root["units"][0]["line"]["w"].size() == 2);
    CHECK(root["units"][0]["line"]["w"][0].get<double>() == 8192.0);
    CHECK(std::fabs(root["units"][0]["line"]["b0"].get<double>() - 4096.0) <= 100.0);
}

TEST_CASE("build reports serialize their knot table") {
    auto f = [](double x) {
        double v = 1.0 + 0.5 * x;
        const double t = x - 0.5;
        return t > 0.0 ? v + 2.0 * t * t : v;
    };
    Spline1D s = construct_spline_from_derivative(f, 2, KnotSet1D{{0.5}});
    SplineBuild built = implement_spline_1d(s, ActivationKind::logistic(), 0.05);
    const std::string text = build_report_to_json(built.report);
    auto root = nlohmann::json::parse(text);
    CHECK(root["dense_l2"].get<double>() == built.report.dense_l2);
    CHECK(root["tol_met"] == built.report.tol_met);
    REQUIRE(root["knots"].size() == built.report.knots.size());
    CHECK(root["knots"][0]["knot"].get<double>() == built.report.knots[0].knot);
    CHECK(root["knots"][0]["rho"].get<double>() == built.report.knots[0].rho);
}

TEST_CASE("plot data is long-format csv") {
    NetUnit base{{2.0}, std::log(0.25 / 0.75) - 1.0, 0.0, ActivationKind::logistic()};
    TwoLayerNet net;
    net.units.push_back(sharpen(base, 0.5, 4096.0).unit);
    net.units[0].lambda = 1.3;
    Dataset d = tabulate([&](double x) { return net.eval(x); }, 0.01);
    AnalysisReport rep = analyze(net, d, Thresholds{});
    const std::string text = plot_csv(net, rep, 0.01);
    CHECK(plot_csv(net, rep, 0.01) == text);

    std::istringstream in(text);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "kind,series,x,y");
    int curves_u0 = 0, curves_net = 0, markers = 0;
    while (std::getline(in, line)) {
        if (line.rfind("curve,u0,", 0) == 0) ++curves_u0;
        if (line.rfind("curve,net,", 0) == 0) ++curves_net;
        if (line.rfind("marker,u0,", 0) == 0) ++markers;
    }
    CHECK(curves_u0 == 101);
    CHECK(curves_net == 101);
    CHECK(markers == 1);

    // several inputs: curves run in the offset coordinate and there is no
    // aggregate series
    NetUnit steep{{8192.0, 0.0}, -8192.0 * 0.5 + std::log(0.25 / 0.75), 0.9,
                  ActivationKind::logistic()};
    TwoLayerNet net2;
    net2.units.push_back(steep);
    Dataset d2 = tabulate2([&](double x, double y) { return net2.eval({x, y}); }, 0.1);
    AnalysisReport rep2 = analyze(net2, d2, Thresholds{});
    const std::string text2 = plot_csv(net2, rep2, 0.01);
    CHECK(text2.find("curve,net,") == std::string::npos);
    CHECK(text2.find("curve,u0,0,") != std::string::npos);      // offset lo = 0
    CHECK(text2.find("curve,u0,8192,") != std::string::npos);   // offset hi = sum of w
    CHECK(text2.find("marker,u0,") != std::string::npos);

    CHECK_THROWS_AS(plot_csv(net, rep, 0.0), std::invalid_argument);
}

TEST_CASE("file helpers round-trip through disk") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "smoothnet_serialize_test";
    fs::create_directories(dir);
    const std::string path = (dir / "net.json").string();
    TwoLayerNet net = sample_net(9, 2);
    write_network_json(path, net);
    TwoLayerNet back = read_network_json(path);
    CHECK(network_to_json(back) == network_to_json(net));
    CHECK_THROWS_AS(read_network_json((dir / "missing.json").string()), std::runtime_error);
    fs::remove_all(dir);
}
