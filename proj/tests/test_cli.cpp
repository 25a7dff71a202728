#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "hasse_cli.hpp"

using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out, err;
    json doc() const { return json::parse(out); }
};

Result run(std::vector<std::string> args, const std::string& input = "") {
    std::istringstream in(input);
    std::ostringstream out, err;
    const int code = hasse::cli::run(args, in, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST(Cli, DensityExample) {
    const auto r = run({"density", "--p", "2", "--n", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.doc()["sigma"], "357/512");
    EXPECT_EQ(run({"density", "--p", "3", "--n", "3"}).doc()["sigma"], "563/729");
    EXPECT_EQ(run({"density", "--p", "3", "--n", "3", "--exhaustive"}).doc()["sigma"], "563/729");
    const auto e = run({"density", "--n", "1", "--cutoff", "1000"}).doc();
    EXPECT_EQ(e["cutoff"], 1000);
    EXPECT_TRUE(e["value"].is_number_float());
}

TEST(Cli, CountNbrBoth) {
    const auto r = run({"count-nbr", "--B", "144", "--method", "both", "--no-timing"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.doc()["enum"], 2);
    EXPECT_EQ(r.doc()["formula"], 2);
    EXPECT_EQ(run({"count-nbr", "--B", "144", "--method", "enum"}).doc()["matched"], 2);
}

TEST(Cli, LocalExample) {
    const auto r = run({"local", "--a", "2", "--b", "3", "--c", "3", "--n", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.doc()["failing_places"], json::array({"3"}));
    EXPECT_FALSE(r.doc()["everywhere_soluble"]);
}

TEST(Cli, ByteIdenticalReruns) {
    for (std::vector<std::string> args :
         {std::vector<std::string>{"count-nloc", "--B", "12", "--no-timing"},
          {"count-sdelta", "--B", "500", "--no-timing"},
          {"growth", "--B", "1000,5000", "--no-timing"},
          {"certify", "--a", "9", "--b", "-3", "--c", "4", "--box", "30"}}) {
        const auto a = run(args);
        ASSERT_EQ(a.code, 0) << a.err;
        EXPECT_EQ(a.out, run(args).out);
        auto p16 = args;
        p16.insert(p16.begin(), {"--partitions", "16", "--threads", "4"});
        EXPECT_EQ(a.out, run(p16).out);
    }
}

TEST(Cli, TimingFieldIsOptional) {
    EXPECT_TRUE(run({"count-sdelta", "--B", "50"}).doc().contains("wall_time"));
    EXPECT_FALSE(run({"count-sdelta", "--B", "50", "--no-timing"}).doc().contains("wall_time"));
}

TEST(Cli, Csv) {
    const auto r = run({"--format", "csv", "growth", "--B", "1000", "--no-timing"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "B,count,count_4B,normalized,quadrupling");
    const auto l = run({"local", "--a", "1", "--b", "1", "--c", "-1", "--n", "1", "--format", "csv"});
    EXPECT_EQ(l.out.substr(0, l.out.find('\n')), "place,reason,soluble");
}

TEST(Cli, CertifyAndVerify) {
    const auto c = run({"certify", "--a", "4", "--b", "-5", "--c", "5", "--box", "40"});
    ASSERT_EQ(c.code, 0) << c.err;
    EXPECT_TRUE(c.doc()["failing"]);
    const auto v = run({"verify"}, c.out);
    EXPECT_EQ(v.code, 0);
    EXPECT_TRUE(v.doc()["valid"]);

    auto tampered = c.doc();
    tampered["verdict"]["outcome"] = "NoObstruction";
    const auto t = run({"verify"}, tampered.dump());
    EXPECT_EQ(t.code, 2);
    EXPECT_FALSE(t.doc()["valid"]);

    EXPECT_EQ(run({"verify"}, "{\"schema_version\":\"other\"}").code, 1);
    EXPECT_EQ(run({"verify"}, "garbage").code, 1);
}

TEST(Cli, OutputFile) {
    const std::string path = testing::TempDir() + "hasse_cli_out.json";
    const auto r = run({"constant", "--cutoff", "1000", "--output", path});
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
    std::ifstream f(path);
    json j;
    f >> j;
    EXPECT_EQ(j["cutoff"], 1000);
    std::remove(path.c_str());
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run({}).code, 1);
    EXPECT_EQ(run({"count-nbr", "--B", "10", "--frob"}).code, 1);
    EXPECT_EQ(run({"count-nbr", "--B", "10", "--method", "magic"}).code, 1);
    EXPECT_EQ(run({"local", "--a", "1"}).code, 1);
    EXPECT_EQ(run({"--threads", "0", "constant"}).code, 1);
    const auto u = run({"nonsense"});
    EXPECT_EQ(u.code, 1);
    EXPECT_NE(u.err.find("Usage"), std::string::npos);
    EXPECT_TRUE(u.out.empty());
    EXPECT_EQ(run({"density", "--n", "1"}).code, 1);
    EXPECT_EQ(run({"density", "--p", "4", "--n", "1"}).code, 1);
    EXPECT_EQ(run({"certify", "--a", "1", "--b", "1", "--c", "1"}).code, 1);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, OverflowIsInternalError) {
    const auto r = run({"certify", "--a", "-1", "--b", "-1", "--c", "9000000000"});
    EXPECT_EQ(r.code, 2) << r.err;
}
