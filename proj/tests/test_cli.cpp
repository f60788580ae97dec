#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(PCF_CLI_PATH) + " " + args + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    std::string out;
    char buf[4096];
    while (std::size_t k = std::fread(buf, 1, sizeof buf, p)) out.append(buf, k);
    const int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
    auto path = std::filesystem::temp_directory_path() / ("pcf_cli_test_" + name);
    std::ofstream(path) << body;
    return path;
}

bool contains(const std::string& s, const std::string& needle) { return s.find(needle) != std::string::npos; }

} // namespace

TEST(Cli, ValidateBuiltinGasket) {
    auto r = run("validate --builtin gasket");
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(contains(r.out, "5 of 5 axioms passed")) << r.out;
}

TEST(Cli, DegreesTableAndVerdict) {
    auto r = run("degrees --builtin gasket --n 3");
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(contains(r.out, "n,d00,d01,d10,d11,l_n,l_n^{1/n}"));
    EXPECT_TRUE(contains(r.out, "\n1,1,1,1,2,"));
    EXPECT_TRUE(contains(r.out, "verdict=case_i")) << r.out;
}

TEST(Cli, SpectrumIsDeterministicAndTagged) {
    auto a = run("spectrum --builtin gasket --n 3 --bc dirichlet");
    auto b = run("spectrum --builtin gasket --n 3 --bc dirichlet");
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out.rfind("# pcf spectrum config=", 0), 0u);
    EXPECT_TRUE(contains(a.out, "tol=1e-08"));
    EXPECT_TRUE(contains(a.out, "lambda,multiplicity\n"));
    bool has_five_halves = false;
    std::istringstream in(a.out);
    for (std::string line; std::getline(in, line);)
        if (!line.empty() && line[0] == '-' && std::abs(std::stod(line) + 2.5) < 1e-9) has_five_halves = true;
    EXPECT_TRUE(has_five_halves);
    auto c = run("spectrum --builtin gasket --n 3 --bc neumann");
    EXPECT_NE(a.out.substr(0, 40), c.out.substr(0, 40)); // different config hash
}

TEST(Cli, NdAndDos) {
    auto nd = run("nd --builtin gasket --n 3 --rho");
    EXPECT_EQ(nd.code, 0);
    EXPECT_TRUE(contains(nd.out, "lambda,n,rho"));
    auto dos = run("dos --builtin interval:1/3 --n 4");
    EXPECT_EQ(dos.code, 0);
    EXPECT_TRUE(contains(dos.out, "lambda,cdf\n"));
}

TEST(Cli, GreenGrid) {
    auto r = run("green --builtin interval:1/2 --re-steps 2 --im-steps 1 --nmax 10");
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(contains(r.out, "re_lambda,im_lambda,value,iters,tail\n"));
    EXPECT_TRUE(contains(r.out, ",10,"));
}

TEST(Cli, GasketMeasureReport) {
    auto r = run("gasket-measure --n 4 --kmax 3");
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(contains(r.out, "atoms without a limit match within 1e-7: 0")) << r.out;
    EXPECT_TRUE(contains(r.out, "location,mass"));
}

TEST(Cli, DecimationReport) {
    auto r = run("decimation --n 2");
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(contains(r.out, "violations 0"));
}

TEST(Cli, OutputDirectory) {
    auto dir = std::filesystem::temp_directory_path() / "pcf_cli_test_out";
    std::filesystem::remove_all(dir);
    auto r = run("spectrum --builtin gasket --n 2 --out " + dir.string());
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(std::filesystem::exists(dir / "spectrum_neumann_n2.csv"));
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run("spectrum --builtin carpet").code, 1);
    EXPECT_EQ(run("spectrum --builtin gasket --tol -1").code, 1);
    EXPECT_EQ(run("frobnicate").code, 1);
    EXPECT_EQ(run("spectrum --builtin gasket --n 9").code, 3);

    auto s = temp_file("bad.json", R"({"N":2,"N0":2,"relation":[[1,2,2,1],[1,1,2,2]],"group":[[1,2]],
        "alpha":["1/2","1/2"],"beta":["1/2","1/2"]})");
    auto b = temp_file("base.json", R"({"a":[[1,2,1]],"b":[1,1]})");
    EXPECT_EQ(run("validate --structure " + s.string() + " --base " + b.string()).code, 2);
    EXPECT_EQ(run("spectrum --structure " + s.string() + " --base " + b.string()).code, 2);

    auto good = temp_file("good.json", R"({"N":2,"N0":2,"relation":[[1,2,2,1]],"group":[[1,2]],
        "alpha":["1/2","1/2"],"beta":["1/2","1/2"]})");
    EXPECT_EQ(run("spectrum --structure " + good.string() + " --base " + b.string() + " --n 3").code, 0);
    auto broken = temp_file("broken.json", "{not json");
    EXPECT_EQ(run("validate --structure " + broken.string() + " --base " + b.string()).code, 1);
}
