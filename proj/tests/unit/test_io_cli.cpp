#include <doctest.h>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cli.hpp"
#include "sqlayer/io.hpp"

using namespace sqlayer;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("sqlayer_test_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

struct CliResult {
  int code;
  std::string out, err;
};

CliResult invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

io::json without_metadata(io::json doc) {
  doc.erase("metadata");
  return doc;
}

}  // namespace

TEST_CASE("network documents round-trip") {
  for (const auto& net : {fixtures::fig2(), fixtures::fig5(), fixtures::fig6()}) {
    auto back = io::network_from_json(io::network_to_json(net));
    CHECK(io::network_to_json(back) == io::network_to_json(net));
    CHECK(back.qp_is_member() == net.qp_is_member());
    CHECK(back.register_order() == net.register_order());
  }
}

TEST_CASE("bundled fixture files match the built-in networks") {
  const std::string dir = SQLAYER_FIXTURES_DIR;
  CHECK(io::network_to_json(io::load_network(dir + "/fig2.json")) == io::network_to_json(fixtures::fig2()));
  CHECK(io::network_to_json(io::load_network(dir + "/fig5.json")) == io::network_to_json(fixtures::fig5()));
  CHECK(io::network_to_json(io::load_network(dir + "/fig6.json")) == io::network_to_json(fixtures::fig6()));
  CHECK(io::network_to_json(io::load_network("fig6")) == io::network_to_json(fixtures::fig6()));
}

TEST_CASE("network document errors") {
  CHECK_THROWS(io::network_from_json(io::json::array()));
  auto doc = io::network_to_json(fixtures::fig2());
  doc["participants"][0]["role"] = "boss";
  CHECK_THROWS(io::network_from_json(doc));
  CHECK_THROWS_AS(io::load_network("/nonexistent/net.json"), std::runtime_error);
  TempDir tmp;
  std::ofstream(tmp.file("bad.json")) << "{ not json";
  CHECK_THROWS_AS(io::load_network(tmp.file("bad.json")), std::runtime_error);
}

TEST_CASE("unitaries round-trip through JSON") {
  auto u = partial_swap(2, 0.4);
  auto v = io::unitary_from_json(io::unitary_to_json(u));
  CHECK(v.acting_dims() == u.acting_dims());
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(v(i, j) - u(i, j)) < 1e-15);
  auto bad = io::unitary_to_json(u);
  bad["matrix"][0] = {2.0, 0.0};
  CHECK_THROWS(io::unitary_from_json(bad));
}

TEST_CASE("state and resource JSON") {
  auto res = synthesize(fixtures::fig2(), ProtocolKind::LSQKD);
  auto j = io::resource_to_json(res);
  CHECK(j.dump().find("bob1") != std::string::npos);
  auto s = io::state_to_json(ghz_reference(2), {"a", "b"});
  CHECK(s.dump().find("\"a\"") != std::string::npos);
}

TEST_CASE("attack grammar") {
  const auto f2 = fixtures::fig2();
  auto a = cli::parse_attack("intercept:bob1", f2);
  CHECK(a.kind == AttackKind::InterceptResend);
  CHECK(a.targets[0].forward);
  CHECK_FALSE(a.targets[0].backward);

  auto b = cli::parse_attack("intercept:bob1,bob2:fb", f2);
  CHECK(b.targets.size() == 2);
  CHECK(b.targets[1].backward);

  auto c = cli::parse_attack("twoway:bob2:fb:theta=0.3:phi=0.2:back=rot", f2);
  CHECK(c.kind == AttackKind::TwoWayEntangle);
  auto want = controlled_rotation(2, 0.2);
  CHECK(std::abs((*c.targets[0].backward_unitary)(2, 0) - want(2, 0)) < 1e-15);

  auto d = cli::parse_attack("lie:bob2:policy=offset:offset=3", fixtures::fig5());
  CHECK(d.lying.mode == LyingMode::Offset);
  CHECK(d.lying.offset == 3);

  CHECK(cli::parse_attack("entangle:bob1", f2).targets[0].forward_unitary.has_value());

  CHECK_THROWS_AS(cli::parse_attack("intercept", f2), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_attack("teleport:bob1", f2), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_attack("entangle:bob1:b", f2), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_attack("twoway:bob1:back=sideways", f2), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_attack("lie:bob1:policy=maybe", f2), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_attack("intercept:bob1:theta=1", f2), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_attack("intercept:alice", f2), std::invalid_argument);
}

TEST_CASE("attack unitaries from a file") {
  TempDir tmp;
  io::json doc{{"forward", io::unitary_to_json(copy_unitary(2))},
               {"backward", io::unitary_to_json(partial_swap(2, 0.1))}};
  std::ofstream(tmp.file("u.json")) << doc.dump();
  auto s = cli::parse_attack("twoway:bob2:fb:file=" + tmp.file("u.json"), fixtures::fig2());
  CHECK(s.targets[0].forward_unitary->acting_dims() == Dims{2, 2});
  CHECK_THROWS(cli::parse_attack("twoway:bob1:fb:file=" + tmp.file("u.json"), fixtures::fig2()));
}

TEST_CASE("family grammar") {
  auto f = cli::parse_family("bob1,bob2:f:back=rot:scale=0.5");
  CHECK(f.targets.size() == 2);
  CHECK(f.forward);
  CHECK_FALSE(f.backward);
  CHECK(f.backward_shape == BackwardShape::Rotation);
  CHECK(f.backward_scale == 0.5);
  CHECK_THROWS_AS(cli::parse_family(""), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_family("bob1:zz=1"), std::invalid_argument);
}

TEST_CASE("run exit codes") {
  TempDir tmp;
  auto pass = invoke({"run", "--protocol", "lsqkd", "--network", "fig2", "--rounds", "3000", "--seed", "1",
                   "--out", tmp.file("pass.json")});
  CHECK(pass.code == cli::kExitPass);
  CHECK(fs::exists(tmp.file("pass.json")));

  auto det = invoke({"run", "--protocol", "lsqkd", "--network", "fig2", "--rounds", "3000", "--seed", "1",
                  "--attack", "intercept:bob1", "--out", tmp.file("det.json")});
  CHECK(det.code == cli::kExitDetected);
  auto report = io::read_json_file(tmp.file("det.json"));
  CHECK(report["detection"]["verdict"]["detected"] == true);

  for (std::vector<std::string> bad : {
           std::vector<std::string>{"run", "--protocol", "lsqkd", "--network", "fig9", "--seed", "1"},
           std::vector<std::string>{"run", "--protocol", "bb84", "--network", "fig2", "--seed", "1"},
           std::vector<std::string>{"run", "--protocol", "lsqkd", "--network", "fig2"},
           std::vector<std::string>{"run", "--protocol", "lsqkd", "--network", "fig2", "--seed", "1",
                                    "--attack", "intercept:nobody"},
           std::vector<std::string>{"run", "--protocol", "lsqkd", "--network", "fig2", "--seed", "1",
                                    "--decoy-rate", "0.1"},
           std::vector<std::string>{"run", "--protocol", "lsqkd", "--network", "fig2", "--seed", "-4"},
       }) {
    const std::string out = tmp.file("never.json");
    bad.push_back("--out");
    bad.push_back(out);
    auto r = invoke(bad);
    CHECK(r.code == cli::kExitConfigError);
    CHECK_FALSE(fs::exists(out));
    CHECK_FALSE(r.err.empty());
  }
}

TEST_CASE("same seed, same report") {
  TempDir tmp;
  const std::vector<std::string> base{"run", "--protocol", "ilskss", "--network", "fig6", "--rounds", "2000",
                                      "--seed", "42", "--attack", "intercept:bob3"};
  auto a = base, b = base;
  a.insert(a.end(), {"--out", tmp.file("a.json"), "--workers", "1"});
  b.insert(b.end(), {"--out", tmp.file("b.json"), "--workers", "2"});
  CHECK(invoke(a).code == invoke(b).code);
  auto ra = io::read_json_file(tmp.file("a.json"));
  auto rb = io::read_json_file(tmp.file("b.json"));
  CHECK(without_metadata(ra) == without_metadata(rb));
  CHECK(ra.contains("meta"));
  CHECK(ra.contains("keys"));
  CHECK(ra.contains("confidentiality"));
  CHECK(ra.contains("rates"));
}

TEST_CASE("config file with flag override") {
  TempDir tmp;
  io::json cfg{{"protocol", "lsqss"}, {"network", "fig5"}, {"rounds", 500}, {"seed", 3}};
  std::ofstream(tmp.file("cfg.json")) << cfg.dump();
  auto r = invoke({"run", "--config", tmp.file("cfg.json"), "--rounds", "700", "--out", tmp.file("r.json")});
  CHECK(r.code == cli::kExitPass);
  auto doc = io::read_json_file(tmp.file("r.json"));
  CHECK(doc["meta"]["rounds"] == 700);
  CHECK(doc["meta"]["seed"] == 3);

  cfg["colour"] = "blue";
  std::ofstream(tmp.file("bad.json")) << cfg.dump();
  CHECK(invoke({"run", "--config", tmp.file("bad.json")}).code == cli::kExitConfigError);
}

TEST_CASE("other subcommands") {
  auto s = invoke({"synth", "--protocol", "lsqkd", "--network", "fig2"});
  CHECK(s.code == 0);
  CHECK(s.out.find("(4, 4, 2)") != std::string::npos);

  auto v = invoke({"validate", "--network", "fig6", "--protocol", "ilskss"});
  CHECK(v.code == 0);
  CHECK(v.out.find("ok") != std::string::npos);

  TempDir tmp;
  auto doc = io::network_to_json(fixtures::fig2());
  doc["layers"][0]["members"] = io::json::array({"bob1"});
  std::ofstream(tmp.file("bad.json")) << doc.dump();
  auto bad = invoke({"validate", "--network", tmp.file("bad.json")});
  CHECK(bad.code == 1);
  CHECK(bad.out.find("invalid") != std::string::npos);

  auto c = invoke({"curve", "--protocol", "lsqkd", "--network", "fig2", "--family", "bob1:f", "--grid", "3"});
  CHECK(c.code == 0);
  std::istringstream lines(c.out);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "parameter,detection_exact,detection_sampled,se,eve_accuracy");
  int rows = 0;
  for (std::string line; std::getline(lines, line);)
    if (!line.empty()) ++rows;
  CHECK(rows == 3);
}
