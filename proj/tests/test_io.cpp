#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cgcn/cli.hpp"
#include "cgcn/io.hpp"
#include "cgcn/synthetic.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cgcn;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cgcn_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

// Two graphs: a triangle (label 1) and an edge (label -1).
fs::path fixture(const std::string& name) {
  const fs::path dir = scratch(name);
  write(dir / "T_A.txt", "1, 2\n2, 1\n2, 3\n3, 2\n1, 3\n3, 1\n4, 5\n5, 4\n");
  write(dir / "T_graph_indicator.txt", "1\n1\n1\n2\n2\n");
  write(dir / "T_graph_labels.txt", "1\n-1\n");
  write(dir / "T_node_labels.txt", "0\n2\n2\n0\n0\n");
  return dir;
}

int run(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  args.insert(args.begin(), "cgcn");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

std::size_t parse_error_line(const std::function<void()>& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e.line();
  }
  return static_cast<std::size_t>(-1);
}

CgcnModel toy_model() {
  TrainConfig c;
  c.hidden_widths = {3};
  c.hops = 1;
  c.landmarks = 5;
  c.epochs = 20;
  return train_layerwise(ring_path_toy({5, 6, 7}, {3, 4, 5}), c).model;
}

}  // namespace

TEST_CASE("hand-written fixture loads exactly") {
  const fs::path dir = fixture("fixture");
  DatasetManifest m;
  const Dataset ds = load_tudataset(dir, "T", &m);
  CHECK(m.graphs == 2);
  CHECK(m.nodes == 5);
  CHECK(m.edges == 4);
  CHECK(m.classes == 2);
  CHECK(m.features == FeatureSource::kOneHotNodeLabels);
  CHECK(ds.samples[0].label == 1);
  CHECK(ds.samples[1].label == 0);
  CHECK(ds.samples[0].graph.num_nodes() == 3);
  CHECK(ds.samples[0].graph.edges().size() == 6);
  CHECK(ds.samples[1].graph.edges().size() == 2);
  Eigen::MatrixXd expected(3, 2);
  expected << 1, 0, 0, 1, 0, 1;
  CHECK(ds.samples[0].signal == expected);
}

TEST_CASE("feature fallback is constant ones") {
  const fs::path dir = fixture("ones");
  fs::remove(dir / "T_node_labels.txt");
  DatasetManifest m;
  const Dataset ds = load_tudataset(dir, "T", &m);
  CHECK(m.features == FeatureSource::kConstantOnes);
  CHECK(ds.samples[1].signal == Eigen::MatrixXd::Ones(2, 1));
}

TEST_CASE("write then load reproduces the dataset") {
  const Dataset ds = ring_path_toy({4, 5}, {3});
  Dataset noisy = ds;
  Rng rng(1);
  for (Sample& s : noisy.samples) s.signal = gaussian_matrix(s.signal.rows(), 2, rng);
  const fs::path dir = scratch("roundtrip");
  write_tudataset(noisy, dir, "R");
  const Dataset back = load_tudataset(dir, "R");
  REQUIRE(back.size() == noisy.size());
  for (std::size_t g = 0; g < back.size(); ++g) {
    CHECK(back.samples[g].label == noisy.samples[g].label);
    CHECK(back.samples[g].signal == noisy.samples[g].signal);
    CHECK(back.samples[g].graph.edges().size() == noisy.samples[g].graph.edges().size());
  }
}

TEST_CASE("malformed files report the offending line") {
  {
    const fs::path dir = fixture("bad_field");
    write(dir / "T_A.txt", "1, 2\n2, 1\n2, x\n");
    CHECK(parse_error_line([&] { load_tudataset(dir, "T"); }) == 3);
  }
  {
    const fs::path dir = fixture("dangling");
    write(dir / "T_A.txt", "1, 2\n\n2, 9\n");
    CHECK(parse_error_line([&] { load_tudataset(dir, "T"); }) == 3);
  }
  {
    const fs::path dir = fixture("cross");
    write(dir / "T_A.txt", "1, 4\n");
    CHECK(parse_error_line([&] { load_tudataset(dir, "T"); }) == 1);
  }
  {
    const fs::path dir = fixture("bad_graph_id");
    write(dir / "T_graph_indicator.txt", "1\n1\n1\n2\n3\n");
    CHECK(parse_error_line([&] { load_tudataset(dir, "T"); }) == 5);
  }
  {
    const fs::path dir = fixture("columns");
    write(dir / "T_A.txt", "1, 2, 3\n");
    CHECK(parse_error_line([&] { load_tudataset(dir, "T"); }) == 1);
  }
  {
    const fs::path dir = fixture("missing");
    fs::remove(dir / "T_graph_labels.txt");
    CHECK_THROWS_AS(load_tudataset(dir, "T"), ParseError);
  }
}

TEST_CASE("MUTAG loads with the reported counts") {
  const fs::path dir = fs::path(CGCN_DATA_DIR) / "MUTAG";
  if (!fs::exists(dir)) return;
  DatasetManifest m;
  const Dataset ds = load_tudataset(dir, "MUTAG", &m);
  // Public copies hold 188 graphs; the manifest reports whatever is on disk.
  CHECK(m.graphs == ds.size());
  CHECK(m.graphs == 188);
  CHECK(m.classes == 2);
  CHECK(m.nodes == 3371);
  CHECK_NOTHROW(ds.validate());
}

TEST_CASE("PROTEINS loads when present") {
  const fs::path dir = fs::path(CGCN_DATA_DIR) / "PROTEINS";
  if (!fs::exists(dir)) return;
  DatasetManifest m;
  load_tudataset(dir, "PROTEINS", &m);
  CHECK(m.graphs == 1113);
  CHECK(double(m.nodes) / double(m.graphs) == doctest::Approx(39.06).epsilon(0.01));
}

TEST_CASE("config text round trips") {
  TrainConfig c;
  c.hidden_widths = {16, 8};
  c.hops = 2;
  c.kernels = {KernelSpec::gaussian_rbf(0.3), KernelSpec::inverse_polynomial(), KernelSpec::gaussian_rbf(1.0 / 3.0)};
  c.optimizer.kind = OptimizerKind::kProjectedGd;
  c.optimizer.step_size = 0.1;
  c.shift_kind = ShiftKind::kLaplacian;
  c.seed = 12345678901234ULL;
  c.random_init = true;
  const std::string text = format_config(c);
  std::istringstream in(text);
  const TrainConfig back = parse_config(in);
  CHECK(format_config(back) == text);
  CHECK(back.kernels[2].gamma == c.kernels[2].gamma);
  CHECK(back.seed == c.seed);
  CHECK(back.hidden_widths == c.hidden_widths);
}

TEST_CASE("config errors carry line numbers") {
  auto line_of = [](const std::string& text) {
    return parse_error_line([&] {
      std::istringstream in(text);
      parse_config(in);
    });
  };
  CHECK(line_of("hops = 1\n# comment\nbogus = 3\n") == 3);
  CHECK(line_of("hops = 1\nhops = 2\n") == 2);
  CHECK(line_of("epochs = many\n") == 1);
  CHECK(line_of("\nno equals sign\n") == 2);
  CHECK_THROWS_AS([] {
    std::istringstream in("epochs = 0\n");
    parse_config(in);
  }(), ParseError);
  CHECK_FALSE(config_help().empty());
}

TEST_CASE("archive round trip preserves predictions") {
  const CgcnModel model = toy_model();
  const ModelArchive back = deserialize_model(serialize_model(model, "echo"));
  CHECK(back.config_echo == "echo");
  CHECK(back.version == kArchiveVersion);
  const Dataset probe = ring_path_toy({4, 9}, {2, 7});
  for (const Sample& s : probe.samples) {
    const Eigen::VectorXd a = model_forward(model, s.graph, s.signal);
    const Eigen::VectorXd b = model_forward(back.model, s.graph, s.signal);
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12);
  }
  CHECK(serialize_model(back.model, "echo") == serialize_model(model, "echo"));
}

TEST_CASE("archive error paths") {
  const std::string bytes = serialize_model(toy_model());
  auto message = [](const std::string& b) -> std::string {
    try {
      deserialize_model(b);
    } catch (const ArchiveError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(message(bytes.substr(0, bytes.size() - 7)).find("checksum") != std::string::npos);
  CHECK(message(bytes.substr(0, 20)).find("checksum") != std::string::npos);
  std::string future = bytes;
  future[8] = static_cast<char>(kArchiveVersion + 1);
  CHECK(message(future).find("version") != std::string::npos);
  std::string flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x10;
  CHECK(message(flipped).find("checksum") != std::string::npos);
  CHECK(message("not an archive").find("magic") != std::string::npos);
  CHECK(message(bytes + "x").find("checksum") != std::string::npos);
}

TEST_CASE("archive files") {
  const fs::path dir = scratch("archive");
  const CgcnModel model = toy_model();
  save_model(model, dir / "m.cgcn", "seed = 1\n");
  const ModelArchive back = load_model(dir / "m.cgcn");
  CHECK(back.config_echo == "seed = 1\n");
  CHECK_THROWS(load_model(dir / "absent.cgcn"));
}

TEST_CASE("cli exit codes") {
  std::string out, err;
  CHECK(run({"--help"}, &out) == 0);
  CHECK(out.find("train") != std::string::npos);
  CHECK(run({"train", "--bogus-flag"}, &out, &err) == 2);
  CHECK(err.find("Usage") != std::string::npos);
  CHECK(run({}, &out, &err) == 2);
  CHECK(run({"frobnicate"}, &out, &err) == 2);
  CHECK(run({"train", "--help"}, &out) == 0);
  CHECK(out.find("learning_rate") != std::string::npos);
}

TEST_CASE("cli train, eval and inspect") {
  const fs::path dir = scratch("cli");
  const Dataset ds = ring_path_toy({4, 5, 6, 7, 8, 9, 10, 11, 12, 13}, {3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
  write_tudataset(ds, dir / "TOY", "TOY");
  write(dir / "toy.cfg", "hidden_widths = 4\nlandmarks = 6\nepochs = 10\n");
  const std::string model = (dir / "toy.cgcn").string();
  std::string out, err;
  CHECK(run({"train", "--data", (dir / "TOY").string(), "--config", (dir / "toy.cfg").string(), "--out", model,
             "--seed", "3", "--quiet"},
            &out, &err) == 0);
  CHECK(out.find("test accuracy") != std::string::npos);
  CHECK(out.find("20 graphs") != std::string::npos);
  CHECK(fs::exists(model));

  CHECK(run({"eval", "--model", model, "--data", (dir / "TOY").string(), "--split", "all"}, &out, &err) == 0);
  CHECK(out.find("all graphs 20 accuracy") != std::string::npos);
  CHECK(run({"eval", "--model", model, "--data", (dir / "TOY").string()}, &out, &err) == 0);
  CHECK(out.find("test graphs 2 ") != std::string::npos);

  CHECK(run({"inspect", "--model", model}, &out, &err) == 0);
  CHECK(out.find(" ok") != std::string::npos);
  CHECK(out.find("VIOLATED") == std::string::npos);

  // A model whose filters leave the ball is flagged.
  ModelArchive archive = load_model(model);
  archive.model.layers[0].filters *= 1e3;
  archive.model.layers[0].filters.array() += 1.0;
  save_model(archive.model, dir / "bad.cgcn", archive.config_echo);
  CHECK(run({"inspect", "--model", (dir / "bad.cgcn").string()}, &out, &err) == 1);
  CHECK(out.find("VIOLATED") != std::string::npos);

  write(dir / "corrupt.cgcn", "CGCNARCH garbage");
  CHECK(run({"inspect", "--model", (dir / "corrupt.cgcn").string()}, &out, &err) == 1);
  CHECK(err.find("error:") != std::string::npos);
}
