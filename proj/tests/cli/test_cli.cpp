#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct Run {
    int exit_code = -1;
    std::string out;
};

// Runs the tool with stderr discarded; arguments are passed through the shell.
Run nevlab(const std::string& args) {
    const std::string cmd = std::string("'") + NEVLAB_CLI_PATH + "' " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) return r;
    char buf[4096];
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string data(const std::string& name) { return std::string("'") + NEVLAB_TEST_DATA + "/" + name + "'"; }

std::string without_wall_time(const std::string& text) {
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line)) {
        if (line.find("\"wall_time_ms\"") == std::string::npos) out += line + "\n";
    }
    return out;
}

int count_lines(const std::string& text) { return static_cast<int>(std::count(text.begin(), text.end(), '\n')); }

}  // namespace

TEST(CliMoments, TotalMass) {
    const auto r = nevlab("moments --model iv --k 0.7071067811865476 --pick const:0,1 --n 10");
    ASSERT_EQ(r.exit_code, 0);
    EXPECT_NE(r.out.find("\"verdict\": \"pass\""), std::string::npos);
    EXPECT_NE(r.out.find("\"tool_version\""), std::string::npos);
    const auto values = r.out.find("\"values\"");
    ASSERT_NE(values, std::string::npos);
    const auto first = r.out.find_first_of("0123456789-", r.out.find('[', values));
    EXPECT_NEAR(std::stod(r.out.substr(first)), 1.0, 1e-10);
}

TEST(CliMoments, CompareAgainstBaseline) {
    EXPECT_EQ(nevlab("moments --model iv --k 0.7071067811865476 --pick const:0,2 --n 10 --compare").exit_code, 0);
}

TEST(CliMoments, BadPick) {
    const auto r = nevlab("moments --pick bogus:x");
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_TRUE(r.out.empty());
}

TEST(CliMoments, UnboundedPickHasNoCertificate) {
    EXPECT_EQ(nevlab("moments --pick tilde:1 --n 2").exit_code, 2);
}

TEST(CliMoments, Csv) {
    const auto r = nevlab("moments --n 3 --format csv");
    ASSERT_EQ(r.exit_code, 0);
    EXPECT_EQ(r.out.rfind("n,moment,error_estimate\n", 0), 0u);
    EXPECT_EQ(count_lines(r.out), 5);
}

TEST(CliVerify, AdbcGrid) {
    const auto r = nevlab("verify adbc --model iv --k 0.7071067811865476 --grid \"-5:5:11x-2:2:5\"");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.out.find("\"verdict\": \"pass\""), std::string::npos);
}

TEST(CliVerify, InZero) {
    EXPECT_EQ(nevlab("verify in-zero --model iv --k 0.5 --pick gdelta:1 --n 0..6").exit_code, 0);
}

TEST(CliVerify, MembershipWithLowerZeroFails) {
    const auto r = nevlab("verify membership --model zero-product --config " + data("bad_zeros.json"));
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.out.find("\"verdict\": \"fail\""), std::string::npos);
}

TEST(CliVerify, MembershipCatalogue) {
    EXPECT_EQ(nevlab("verify membership --model iv").exit_code, 0);
}

TEST(CliVerify, IdentityIsSeeded) {
    const auto a = nevlab("verify identity --seed 5 --samples 50");
    const auto b = nevlab("verify identity --seed 5 --samples 50");
    const auto c = nevlab("verify identity --seed 6 --samples 50");
    ASSERT_EQ(a.exit_code, 0);
    EXPECT_EQ(without_wall_time(a.out), without_wall_time(b.out));
    EXPECT_NE(without_wall_time(a.out), without_wall_time(c.out));
}

TEST(CliVerify, ConfigFileScenario) {
    const auto r = nevlab("verify identity --samples 20 --config " + data("tilde_half.json"));
    ASSERT_EQ(r.exit_code, 0);
    EXPECT_NE(r.out.find("\"model\": \"iv-tilde\""), std::string::npos);
    EXPECT_NE(r.out.find("\"seed\": 99"), std::string::npos);
}

TEST(CliVerify, UsageErrors) {
    EXPECT_EQ(nevlab("verify nonsense").exit_code, 2);
    EXPECT_EQ(nevlab("verify adbc --grid 1:2").exit_code, 2);
    EXPECT_EQ(nevlab("verify in-zero --n 0..40").exit_code, 2);
    EXPECT_EQ(nevlab("verify identity --config " + data("unknown_key.json")).exit_code, 2);
    EXPECT_EQ(nevlab("verify identity --config " + data("missing.json")).exit_code, 2);
    EXPECT_EQ(nevlab("verify identity --tol -1").exit_code, 2);
    EXPECT_EQ(nevlab("verify identity --format xml").exit_code, 2);
    EXPECT_EQ(nevlab("--no-such-flag").exit_code, 2);
}

TEST(CliDensity, Grid) {
    const auto r = nevlab("density --model iv --k 0.7071067811865476 --pick const:0,1 --range -20:20 --points 801");
    ASSERT_EQ(r.exit_code, 0);
    EXPECT_EQ(count_lines(r.out), 802);
    EXPECT_NE(r.out.find("\n0,0.25,0.25,0\n"), std::string::npos);
}

TEST(CliDensity, ZeroPoints) {
    EXPECT_EQ(nevlab("density --points 0").exit_code, 2);
}

TEST(CliCaseStudy, Default) {
    const auto r = nevlab("case-study");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.out.find("\"verdict\": \"pass\""), std::string::npos);
}

TEST(CliCaseStudy, OtherModulusCarriesNotes) {
    const auto r = nevlab("case-study --k 0.5");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.out.find("diagnostic"), std::string::npos);
}

TEST(CliCaseStudy, ModulusOutOfRange) {
    EXPECT_EQ(nevlab("case-study --k 1.2").exit_code, 2);
}

TEST(CliReports, DeterministicApartFromWallTime) {
    const std::string args = "verify parametrization --model iv --k 0.5";
    const auto a = nevlab(args);
    const auto b = nevlab(args);
    ASSERT_EQ(a.exit_code, 0);
    EXPECT_EQ(without_wall_time(a.out), without_wall_time(b.out));
}

TEST(CliReports, OutFile) {
    const auto path = std::filesystem::temp_directory_path() / "nevlab_cli_out_test.json";
    std::filesystem::remove(path);
    const auto r = nevlab("moments --n 2 --out '" + path.string() + "'");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    EXPECT_NE(buf.str().find("\"verdict\": \"pass\""), std::string::npos);
    std::filesystem::remove(path);
}
