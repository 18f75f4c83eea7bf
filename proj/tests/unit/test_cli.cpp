#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const std::string kCli = BQFL_CLI_PATH;
const std::string kFast =
    " --set synthetic.d=80 --set experiment.projection_k=30 --set anneal.reads=10 --set anneal.sweeps_per_read=50";

struct Result {
    int code = -1;
    std::string output;
};

fs::path scratch() {
    const auto dir = fs::temp_directory_path() / "bqfl_cli_test";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Result run(const std::string& args) {
    const auto log = scratch() / "last.log";
    const std::string cmd = kCli + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(log)};
}

std::size_t line_count(const std::string& text) {
    std::size_t n = 0;
    for (char c : text) {
        n += c == '\n' ? 1 : 0;
    }
    return n;
}

}  // namespace

TEST_CASE("run writes CSV and JSON at the configured path") {
    const auto dir = scratch();
    const auto cfg = dir / "exp.toml";
    std::ofstream(cfg) << "[experiment]\nrounds = 3\noutput_path = \"" << (dir / "from_config.csv").string() << "\"\n";
    const auto r = run("run --config " + cfg.string() + " --attack sign_flip" + kFast);
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "from_config.csv"));
    CHECK(fs::exists(dir / "from_config.json"));
    const auto csv = slurp(dir / "from_config.csv");
    CHECK(line_count(csv) == 4);
    CHECK(csv.rfind("round,", 0) == 0);
    CHECK(slurp(dir / "from_config.json").find("\"final_model_hash\"") != std::string::npos);
    CHECK(r.output.find("sign_flip") != std::string::npos);
}

TEST_CASE("unknown attack exits nonzero and lists the valid names") {
    const auto r = run("run --attack nope --rounds 1" + kFast);
    CHECK(r.code != 0);
    CHECK(r.output.find("sparse_lie") != std::string::npos);
    CHECK(r.output.find("blatant_lie") != std::string::npos);
}

TEST_CASE("same seed gives identical files") {
    const auto dir = scratch();
    const std::string common = " --rounds 3 --seed 7 --attack alie" + kFast;
    REQUIRE(run("run --out " + (dir / "a.csv").string() + common).code == 0);
    REQUIRE(run("run --out " + (dir / "b.csv").string() + common + " --workers 2").code == 0);
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    const auto ja = slurp(dir / "a.json");
    const auto jb = slurp(dir / "b.json");
    // output_path differs between the two runs; everything else must match.
    CHECK(ja.substr(0, ja.find("\"output_path\"")) == jb.substr(0, jb.find("\"output_path\"")));
}

TEST_CASE("sweep over all attacks and two aggregators") {
    const auto dir = scratch();
    const auto out = dir / "grid.csv";
    const std::string attacks =
        "gaussian_noise,sign_flip,scale,targeted,clustered,same_value,lie,blatant_lie,alie,sparse_lie,label_flip,"
        "shuffle,stealthy";
    const auto r = run("sweep --attacks " + attacks + " --aggregators classical,qubo --rounds 2 --out " +
                       out.string() + kFast);
    CHECK(r.code == 0);
    const auto csv = slurp(out);
    CHECK(line_count(csv) == 27);
    CHECK(csv.find("label_flip,classical,1,2,,,,,failed,label flip requires trainer backend") != std::string::npos);
    const auto table = slurp(dir / "grid_table.csv");
    CHECK(line_count(table) == 14);
}

TEST_CASE("sweep at a hundred clients") {
    const auto out = scratch() / "big.csv";
    const auto r = run("sweep --attacks clustered,sign_flip,gaussian_noise,scale,sparse_lie,alie "
                       "--aggregators classical,cascade,multisignal --n 100 --f 20 --rounds 1 --out " +
                       out.string() + kFast);
    CHECK(r.code == 0);
    CHECK(line_count(slurp(out)) == 19);
}

TEST_CASE("empty grid is an error") {
    const auto dir = scratch();
    const auto cfg = dir / "empty.toml";
    std::ofstream(cfg) << "[sweep]\nattacks = []\naggregators = []\n";
    CHECK(run("sweep --config " + cfg.string()).code != 0);
    CHECK(run("sweep --aggregators classical").code != 0);
}

TEST_CASE("verify guards the exact solver") {
    const auto r = run("verify --n 30");
    CHECK(r.code != 0);
    const auto small = run("verify --n 4 --instances 5 --reads 50 --sweeps 100");
    CHECK(small.code == 0);
    CHECK(small.output.find("verify: PASS") != std::string::npos);
    const auto tiny = run("verify --n 4");
    CHECK(tiny.code == 0);
    CHECK(tiny.output.find("100/100 instances >= exact min") != std::string::npos);
}

TEST_CASE("dump-qubo writes the text format") {
    const auto out = scratch() / "round.qubo";
    REQUIRE(run("dump-qubo --n 6 --f 1 --attack lie --round 1 --out " + out.string() + kFast).code == 0);
    std::istringstream in(slurp(out));
    std::size_t n = 0, m = 0;
    double lambda = 0.0;
    in >> n >> m >> lambda;
    CHECK(n == 6);
    CHECK(m == 5);
    CHECK(lambda > 0.0);
    CHECK(line_count(slurp(out)) == 1 + 6 + 15);
    CHECK(run("dump-qubo --kind nonsense --rounds 1" + kFast).code != 0);
}
