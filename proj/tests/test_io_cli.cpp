#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "oracles.hpp"
#include "tnt/cli.hpp"
#include "tnt/generators.hpp"
#include "tnt/io.hpp"
#include "tnt/matrix_kernels.hpp"
#include "tnt/qtt.hpp"
#include "tnt/tensor_ops.hpp"

using namespace tnt;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("tnt_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run_cli(std::initializer_list<std::string> args) {
    std::vector<std::string> storage{"tnt"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& s : storage) argv.push_back(s.c_str());
    return cli_main(static_cast<int>(argv.size()), argv.data());
}

std::vector<char> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::vector<char>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("dense file round trips bit-exactly") {
    TempDir dir;
    // Order-0 scalar.
    DenseTensor s = DenseTensor::scalar(2.75);
    write_dense(dir.file("s.dt"), s);
    CHECK(read_dense(dir.file("s.dt")) == s);

    // Sequential 2x3x4 tensor.
    DenseTensor t{Shape{2, 3, 4}};
    for (Index i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i) * 0.5 - 3.0;
    write_dense(dir.file("t.dt"), t);
    CHECK(read_dense(dir.file("t.dt")) == t);

    // Writing twice produces identical bytes.
    write_dense(dir.file("t2.dt"), t);
    CHECK(slurp(dir.file("t.dt")) == slurp(dir.file("t2.dt")));
}

TEST_CASE("dense reader rejects malformed files with distinct codes") {
    TempDir dir;
    DenseTensor t = random_dense(Shape{2, 2}, 1);
    write_dense(dir.file("ok.dt"), t);

    // Corrupted magic.
    auto bytes = slurp(dir.file("ok.dt"));
    bytes[0] = 'X';
    std::ofstream(dir.file("bad_magic.dt"), std::ios::binary)
        .write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    try {
        read_dense(dir.file("bad_magic.dt"));
        FAIL("expected bad magic error");
    } catch (const IoError& e) {
        CHECK(e.code() == IoCode::bad_magic);
        CHECK(std::string(e.what()).find("bad magic") != std::string::npos);
    }

    // Truncated payload.
    auto good = slurp(dir.file("ok.dt"));
    good.resize(good.size() - 9);
    std::ofstream(dir.file("short.dt"), std::ios::binary)
        .write(good.data(), static_cast<std::streamsize>(good.size()));
    try {
        read_dense(dir.file("short.dt"));
        FAIL("expected truncation error");
    } catch (const IoError& e) {
        CHECK(e.code() == IoCode::truncated);
    }

    // Overflowing element count.
    {
        std::ofstream out(dir.file("huge.dt"), std::ios::binary);
        out.write("DTEN", 4);
        const std::uint32_t version = 1, order = 3;
        out.write(reinterpret_cast<const char*>(&version), 4);
        out.write(reinterpret_cast<const char*>(&order), 4);
        const std::uint64_t dim = std::uint64_t{1} << 39;
        for (int i = 0; i < 3; ++i) out.write(reinterpret_cast<const char*>(&dim), 8);
    }
    try {
        read_dense(dir.file("huge.dt"));
        FAIL("expected overflow error");
    } catch (const IoError& e) {
        CHECK(e.code() == IoCode::overflow);
    }

    CHECK_THROWS_AS(read_dense(dir.file("missing.dt")), IoError);
}

TEST_CASE("tnz round trips preserve every format bit-exactly") {
    TempDir dir;

    SUBCASE("tt") {
        TTTensor x = random_tt(std::array<Index, 3>{3, 4, 2}, std::array<Index, 2>{2, 3}, 2);
        TnzContainer c{TnzFormat::tt, x.shape(), std::nullopt, 1e-9, x};
        write_tnz(dir.file("x.tnz"), c);
        TnzContainer back = read_tnz(dir.file("x.tnz"));
        CHECK(back.format == TnzFormat::tt);
        CHECK(back.eps == 1e-9);
        const auto& y = std::get<TTTensor>(back.payload);
        CHECK(y.ranks() == x.ranks());
        for (Index n = 0; n < x.order(); ++n) CHECK(y.core(n) == x.core(n));
    }
    SUBCASE("mpo") {
        TTMatrix a = random_mpo(std::array<Index, 2>{2, 3}, std::array<Index, 2>{3, 2},
                                std::array<Index, 1>{2}, 3);
        Shape flat{6, 6};
        TnzContainer c{TnzFormat::mpo, flat, std::nullopt, 0.0, a};
        write_tnz(dir.file("a.tnz"), c);
        TnzContainer back = read_tnz(dir.file("a.tnz"));
        const auto& b = std::get<TTMatrix>(back.payload);
        for (Index n = 0; n < a.order(); ++n) CHECK(b.core(n) == a.core(n));
    }
    SUBCASE("cp, tucker, tc") {
        KruskalTensor k;
        k.weights = VectorXd::Ones(2);
        k.factors = {gaussian_matrix(3, 2, 4), gaussian_matrix(2, 2, 5)};
        write_tnz(dir.file("k.tnz"), {TnzFormat::cp, k.shape(), std::nullopt, 0.5, k});
        auto kb = std::get<KruskalTensor>(read_tnz(dir.file("k.tnz")).payload);
        CHECK(kb.weights == k.weights);
        CHECK(kb.factors[0] == k.factors[0]);

        TuckerTensor tk = random_tucker(std::array<Index, 2>{4, 3}, std::array<Index, 2>{2, 2}, 6);
        write_tnz(dir.file("tk.tnz"), {TnzFormat::tucker, tk.shape(), std::nullopt, 0.0, tk});
        auto tkb = std::get<TuckerTensor>(read_tnz(dir.file("tk.tnz")).payload);
        CHECK(tkb.core == tk.core);

        TCTensor tc = random_tc(std::array<Index, 3>{2, 2, 2}, 2, 7);
        write_tnz(dir.file("tc.tnz"), {TnzFormat::tc, tc.shape(), std::nullopt, 0.0, tc});
        auto tcb = std::get<TCTensor>(read_tnz(dir.file("tc.tnz")).payload);
        for (Index n = 0; n < tc.order(); ++n) CHECK(tcb.core(n) == tc.core(n));
    }
    SUBCASE("quantization plan travels with the container") {
        DenseTensor v = gen_synthetic(SyntheticKind::geometric, {{64}, {}, 0, 0.9});
        QuantizationPlan plan = make_plan(v.shape(), 2);
        auto [tt, used] = qtt_compress(v, plan, 1e-10);
        TnzContainer c{TnzFormat::tt, v.shape(), used, 1e-10, tt};
        write_tnz(dir.file("q.tnz"), c);
        TnzContainer back = read_tnz(dir.file("q.tnz"));
        REQUIRE(back.plan.has_value());
        CHECK(back.plan->mode_factors == used.mode_factors);
        CHECK(oracle::abs_err(tnz_densify(back), v) <= 1e-9);
    }
}

TEST_CASE("tnz reader reports a broken rank chain with the core position") {
    TempDir dir;
    // Hand-built TT container whose cores do not chain: (1,2,3) then (2,2,1).
    {
        std::ofstream out(dir.file("bad.tnz"), std::ios::binary);
        auto u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
        auto u64 = [&](std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); };
        auto f64 = [&](double v) { out.write(reinterpret_cast<const char*>(&v), 8); };
        out.write("TNET", 4);
        u32(1);              // version
        u32(3);              // tag: tt
        u32(2); u64(2); u64(2);  // original shape 2x2
        u32(0);              // no plan
        f64(0.0);            // eps
        u32(2);              // two records
        u32(3); u64(1); u64(2); u64(3);
        for (int i = 0; i < 6; ++i) f64(0.0);
        u32(3); u64(2); u64(2); u64(1);
        for (int i = 0; i < 4; ++i) f64(0.0);
    }
    try {
        read_tnz(dir.file("bad.tnz"));
        FAIL("expected rank chain error");
    } catch (const IoError& e) {
        CHECK(e.code() == IoCode::rank_chain);
        CHECK(std::string(e.what()).find("rank chain mismatch at core 0") != std::string::npos);
    }
}

TEST_CASE("cli compress, verify, info, round trip") {
    TempDir dir;
    const std::string dt = dir.file("in.dt");
    const std::string tnz = dir.file("out.tnz");
    const std::string back = dir.file("back.dt");

    CHECK(run_cli({"gen", "--kind", "rank1", "--dims", "4,4,4", "--seed", "3", dt}) == 0);
    CHECK(run_cli({"compress", "--format", "tt", "--eps", "1e-10", dt, tnz}) == 0);
    CHECK(run_cli({"verify", dt, tnz}) == 0);
    CHECK(run_cli({"decompress", tnz, back}) == 0);
    DenseTensor t = read_dense(dt);
    CHECK(oracle::abs_err(read_dense(back), t) <= 1e-10 * t.norm());

    // info reports the parameter-count formula.
    CHECK(run_cli({"info", tnz}) == 0);
    CHECK(run_cli({"info", tnz, "--json"}) == 0);

    // Unknown flags and bad formats exit 1; missing files exit 2.
    CHECK(run_cli({"compress", "--format", "nonsense", "--eps", "1e-4", dt, tnz}) == 1);
    CHECK(run_cli({"compress", "--frobnicate", "--eps", "1e-4", dt, tnz}) == 1);
    CHECK(run_cli({"info", dir.file("missing.tnz")}) == 2);
    CHECK(run_cli({"round", "--eps", "1e-4", dt, tnz}) == 2);  // .dt is not a .tnz
}

TEST_CASE("cli verify fails with exit 3 when accuracy is not met") {
    TempDir dir;
    const std::string dt = dir.file("in.dt");
    const std::string other = dir.file("other.dt");
    const std::string tnz = dir.file("out.tnz");
    CHECK(run_cli({"gen", "--kind", "rand-tt", "--dims", "3,4,3", "--ranks", "2,2",
                   "--seed", "5", dt}) == 0);
    CHECK(run_cli({"compress", "--format", "tt", "--eps", "1e-12", dt, tnz}) == 0);
    CHECK(run_cli({"verify", dt, tnz}) == 0);
    // Verifying against a different tensor must fail.
    CHECK(run_cli({"gen", "--kind", "rand-tt", "--dims", "3,4,3", "--ranks", "2,2",
                   "--seed", "6", other}) == 0);
    CHECK(run_cli({"verify", other, tnz}) == 3);
}

TEST_CASE("cli round and ortho rewrite containers") {
    TempDir dir;
    const std::string dt = dir.file("in.dt");
    const std::string tnz = dir.file("a.tnz");
    const std::string fat = dir.file("fat.tnz");
    const std::string slim = dir.file("slim.tnz");
    const std::string orth = dir.file("orth.tnz");

    CHECK(run_cli({"gen", "--kind", "rand-tt", "--dims", "3,3,3", "--ranks", "2,2",
                   "--seed", "7", dt}) == 0);
    CHECK(run_cli({"compress", "--format", "tt", "--eps", "1e-10", dt, tnz}) == 0);
    CHECK(run_cli({"op", "add", tnz, tnz, "-o", fat}) == 0);
    CHECK(run_cli({"round", "--eps", "1e-10", fat, slim}) == 0);
    auto slim_tt = std::get<TTTensor>(read_tnz(slim).payload);
    auto base_tt = std::get<TTTensor>(read_tnz(tnz).payload);
    CHECK(slim_tt.ranks() == base_tt.ranks());

    CHECK(run_cli({"ortho", "--center", "2", tnz, orth}) == 0);
    // The file format stores cores only; verify the orthogonality property
    // around the requested center directly.
    auto orth_tt = std::get<TTTensor>(read_tnz(orth).payload);
    {
        MatrixXd q = orth_tt.left_unfolding(0);
        CHECK((q.transpose() * q - MatrixXd::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff() <
              1e-10);
        MatrixXd p = orth_tt.right_unfolding(2);
        CHECK((p * p.transpose() - MatrixXd::Identity(p.rows(), p.rows())).cwiseAbs().maxCoeff() <
              1e-10);
    }
    CHECK(oracle::rel_err(tt_full(orth_tt), tt_full(base_tt)) < 1e-12);
}

TEST_CASE("cli op inner matches the dense norm") {
    TempDir dir;
    const std::string dt = dir.file("in.dt");
    const std::string tnz = dir.file("a.tnz");
    CHECK(run_cli({"gen", "--kind", "hilbert", "--dims", "4,4,4", dt}) == 0);
    CHECK(run_cli({"compress", "--format", "tt", "--eps", "1e-12", dt, tnz}) == 0);
    // The printed value is checked in the acceptance suite via --json capture;
    // here the call must simply succeed.
    CHECK(run_cli({"op", "inner", tnz, tnz}) == 0);
    CHECK(run_cli({"op", "hadamard", tnz, tnz, "-o", dir.file("h.tnz"),
                   "--round-eps", "1e-10"}) == 0);
    CHECK(run_cli({"op", "unknown", tnz, tnz}) == 1);
    CHECK(run_cli({"op", "add", tnz, tnz}) == 1);  // missing -o
}

TEST_CASE("cli qtt, tucker and cp compression paths verify") {
    TempDir dir;
    const std::string vec = dir.file("vec.dt");
    CHECK(run_cli({"gen", "--kind", "geometric", "--dims", "256", "--rho", "0.9", vec}) == 0);
    CHECK(run_cli({"compress", "--format", "qtt", "--eps", "1e-10", vec, dir.file("v.tnz")}) == 0);
    CHECK(run_cli({"verify", vec, dir.file("v.tnz")}) == 0);

    const std::string cube = dir.file("cube.dt");
    CHECK(run_cli({"gen", "--kind", "rand-tucker", "--dims", "5,5,5", "--ranks", "2,2,2",
                   "--seed", "9", cube}) == 0);
    CHECK(run_cli({"compress", "--format", "tucker", "--eps", "1e-10", cube,
                   dir.file("c.tnz")}) == 0);
    CHECK(run_cli({"verify", cube, dir.file("c.tnz")}) == 0);

    const std::string r1 = dir.file("r1.dt");
    CHECK(run_cli({"gen", "--kind", "rank1", "--dims", "4,4,4", "--seed", "10", r1}) == 0);
    CHECK(run_cli({"compress", "--format", "cp", "--eps", "1e-6", "--max-rank", "1", r1,
                   dir.file("r1.tnz")}) == 0);
    CHECK(run_cli({"verify", r1, dir.file("r1.tnz")}) == 0);
    // CP without a rank is a usage error.
    CHECK(run_cli({"compress", "--format", "cp", "--eps", "1e-6", r1, dir.file("no.tnz")}) == 1);
}
