#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

using Json = nlohmann::ordered_json;

namespace
{

struct CliResult {
    int status = -1;
    std::string out;
};

// Runs the CLI from the test data directory; stderr goes to stdout when
// `merge` is set.
CliResult run(const std::string &args, bool merge = false, const std::string &env = "")
{
    const std::string cmd = std::string("cd '") + FGL_DATA_DIR + "' && " + env + " '" + FGL_CLI_PATH + "' " + args +
                            (merge ? " 2>&1" : " 2>/dev/null");
    CliResult r;
    FILE *pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) {
        return r;
    }
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) {
        r.out.append(buf.data(), n);
    }
    const int st = ::pclose(pipe);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string read_file(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Byte comparison against tests/golden/<name>; FGL_UPDATE_GOLDEN=1 rewrites.
void expect_golden(const std::string &name, const std::string &actual)
{
    const std::string path = std::string(FGL_GOLDEN_DIR) + "/" + name;
    if (const char *u = std::getenv("FGL_UPDATE_GOLDEN"); u && std::string(u) == "1") {
        std::ofstream(path, std::ios::binary) << actual;
        return;
    }
    const std::string expected = read_file(path);
    ASSERT_FALSE(expected.empty()) << "missing golden file " << path;
    EXPECT_EQ(actual, expected) << "golden mismatch for " << name;
}

Json run_json(const std::string &args, int expected_status, const std::string &golden)
{
    const CliResult r = run(args + " --json");
    EXPECT_EQ(r.status, expected_status) << args;
    expect_golden(golden, r.out);
    return Json::parse(r.out);
}

const Json &term(const Json &series, std::vector<int> exp)
{
    for (const auto &t : series.at("terms")) {
        if (t.at("exp").get<std::vector<int>>() == exp) {
            return t.at("coeff");
        }
    }
    static const Json none;
    return none;
}

} // namespace

TEST(Cli, FromLogIdentityGivesAdditiveLaw)
{
    const Json j = run_json("from-log --series T --degree 4", 0, "from_log_identity.json");
    EXPECT_EQ(j["law"]["F"]["text"], "x + y");
    EXPECT_TRUE(j["passed"].get<bool>());
}

TEST(Cli, FromLogWithScalars)
{
    const Json j = run_json("from-log --series 'T + T^2/2' --degree 3 --scalars 2,-1", 0, "from_log_scalars.json");
    EXPECT_EQ(j["law"]["F"]["text"], "x + y - x*y + x^2*y + x*y^2");
    EXPECT_TRUE(j["action_report"]["passed"].get<bool>());
}

TEST(Cli, LubinTateMultiplicativePreset)
{
    const Json j = run_json("lubin-tate --p 5 --preset multiplicative --degree 8 --precision 8 --endo 2,7", 0, "lubin_tate_multiplicative.json");
    EXPECT_EQ(j["law"]["F"]["text"], "x + y + x*y");
    // [7](x) = (1+x)^7 - 1: coefficient of x^3 is C(7,3) = 35.
    const auto &e7 = j["action"]["endomorphisms"][1];
    EXPECT_EQ(e7["label"], "7");
    EXPECT_EQ(term(e7["series"], {3})["value"], "35");
    EXPECT_EQ(term(e7["series"], {7})["value"], "1");
    EXPECT_TRUE(term(e7["series"], {8}).is_null());
}

TEST(Cli, LubinTateEisenstein)
{
    const Json j = run_json("lubin-tate --p 5 --eisenstein 't^2-5' --series 'pi*T+T^5' --degree 6 --precision 4 --endo pi", 0,
                            "lubin_tate_eisenstein.json");
    EXPECT_EQ(j["ring"], "Z_5[pi]/(pi^2 - 5), m^4");
    EXPECT_EQ(j["defining_identity"], "pass");
    EXPECT_TRUE(j["passed"].get<bool>());
}

TEST(Cli, CheckAcceptsVerifiedBundle)
{
    const Json j = run_json("check --bundle multiplicative_action.json", 0, "check_ok.json");
    EXPECT_TRUE(j["passed"].get<bool>());
}

TEST(Cli, CheckRejectsCorruptedBundle)
{
    const Json j = run_json("check --bundle corrupted_action.json", 1, "check_corrupted.json");
    EXPECT_FALSE(j["passed"].get<bool>());
    EXPECT_FALSE(j["axioms"]["commutativity"]["passed"].get<bool>());
    EXPECT_EQ(j["axioms"]["commutativity"]["first_failure"], "x^2*y");
    const CliResult text = run("check --bundle corrupted_action.json");
    EXPECT_EQ(text.status, 1);
    EXPECT_NE(text.out.find("commutativity: FAIL"), std::string::npos);
}

TEST(Cli, LogOfMultiplicativeLaw)
{
    const Json j = run_json("log --law 'x+y+x*y' --degree 5", 0, "log_multiplicative.json");
    EXPECT_EQ(j["logarithm"]["text"], "T - 1/2*T^2 + 1/3*T^3 - 1/4*T^4 + 1/5*T^5");
}

TEST(Cli, RecoverSingleSum)
{
    const Json j = run_json("recover-add --p 5 --n 2 --V 3 --a 2 --b 3", 0, "recover_sum.json");
    EXPECT_EQ(j["sum"], "v1u1");
    EXPECT_EQ(j["flags"][0], "cancellation");
    const CliResult text = run("recover-add --p 5 --n 2 --V 3 --a 7 --b 11");
    EXPECT_EQ(text.status, 0);
    EXPECT_NE(text.out.find("= v0u18"), std::string::npos) << text.out;
}

TEST(Cli, RecoverFullTable)
{
    const Json j = run_json("recover-add --p 5 --n 1 --V 2 --table", 0, "recover_table.json");
    const Json &add = j["addition"];
    EXPECT_TRUE(add["passed"].get<bool>());
    EXPECT_EQ(add["size"], 10);
    EXPECT_EQ(add["native_mismatches"], 0);
    // 1 + 4 lands on valuation 1 with a cancellation flag; 1 + 1 = 2 is clean.
    EXPECT_EQ(add["table"]["v0u1"]["v0u4"]["sum"], "v1u1");
    EXPECT_EQ(add["table"]["v0u1"]["v0u1"], "v0u2");
}

TEST(Cli, DemoVariation)
{
    const Json j = run_json("demo-variation --n 3 --V 2 --twists 2 --examples 1", 0, "demo_variation.json");
    EXPECT_TRUE(j["variation_everywhere"].get<bool>());
}

TEST(Cli, UniversalFreeMonoid)
{
    const Json j = run_json("universal --free m --degree 2", 0, "universal_free.json");
    ASSERT_EQ(j["ideal"].size(), 1u);
    EXPECT_EQ(j["ideal"][0]["text"], "-m^2*c_1_1 + m*c_1_1 + 2*d_m_2");
    const CliResult text = run("universal --monoid c2_monoid.json --degree 2 --text");
    EXPECT_EQ(text.status, 0);
    EXPECT_EQ(text.out, "g^2 - 1, g*c_1_1 - c_1_1 + 2*d_g_2, g*d_g_2 + d_g_2\n");
}

TEST(Cli, UniversalWritesFile)
{
    const std::string out = ::testing::TempDir() + "pres.json";
    const CliResult r = run("universal --free m --degree 3 --out '" + out + "'");
    EXPECT_EQ(r.status, 0);
    const Json j = Json::parse(read_file(out));
    EXPECT_EQ(j.dump(2) + "\n", run("universal --free m --degree 3 --json").out);
}

TEST(Cli, SpecializePassesAndFails)
{
    const Json ok = run_json("specialize --free m --degree 2 --ring Z --images images.json", 0, "specialize_ok.json");
    EXPECT_TRUE(ok["passed"].get<bool>());
    const Json bad = run_json("specialize --free m --degree 2 --ring Z --image m=3 --image c_1_1=1 --image d_m_2=0", 1, "specialize_fail.json");
    EXPECT_EQ(bad["ideal"]["failures"][0]["relation"], "Q_{m,2}[x*y]");
    EXPECT_EQ(bad["ideal"]["failures"][0]["value"], "-6");
}

TEST(Cli, ClassifyLubinTate)
{
    const Json j = run_json("classify --free a --degree 4 --p 5 --precision 8 --preset multiplicative --generator a=2", 0, "classify_lubin_tate.json");
    EXPECT_EQ(j["hom"]["images"]["c_1_1"], "1");
    EXPECT_EQ(j["hom"]["images"]["d_a_2"], "1");
    EXPECT_TRUE(j["ideal"]["passed"].get<bool>());
}

TEST(Cli, InvalidInputExitsTwo)
{
    const CliResult eis = run("lubin-tate --p 5 --eisenstein 't^2-3' --degree 3 --json", true);
    EXPECT_EQ(eis.status, 2);
    const Json err = Json::parse(eis.out);
    EXPECT_EQ(err["error"], "invalid_input");
    EXPECT_NE(err["message"].get<std::string>().find("Eisenstein"), std::string::npos);
    EXPECT_EQ(run("from-log --series 'T+*T' --degree 3").status, 2);
    EXPECT_EQ(run("from-log --series '2*T' --degree 3").status, 2);
    EXPECT_EQ(run("universal --free m --degree 3 --bogus").status, 2);
    EXPECT_EQ(run("specialize --free m --degree 2 --ring Z --image m=3").status, 2);
}

TEST(Cli, BudgetFromEnvironment)
{
    EXPECT_EQ(run("universal --free a,b --degree 6").status, 0);
    const CliResult r = run("universal --free a,b --degree 6 --json", true, "FGL_BUDGET=5");
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.out.find("FGL_BUDGET"), std::string::npos) << r.out;
}

TEST(Cli, OutputIsByteStable)
{
    for (const char *args : {"universal --free m,n --degree 3 --json", "recover-add --p 5 --n 1 --V 2 --table --json",
                             "lubin-tate --p 3 --series '3*T+T^3' --degree 5 --precision 4 --endo 2 --json"}) {
        EXPECT_EQ(run(args).out, run(args).out) << args;
    }
}
