#include "tnt/cli.hpp"

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tnt/generators.hpp"
#include "tnt/io.hpp"
#include "tnt/qtt.hpp"
#include "tnt/tensor_ops.hpp"

namespace tnt {

namespace {

std::vector<Index> parse_csv(const std::string& s, const char* what) {
    std::vector<Index> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(static_cast<Index>(std::stoll(item)));
        } catch (...) {
            throw CLI::ValidationError(std::string(what) + ": expected comma-separated integers");
        }
    }
    if (out.empty()) throw CLI::ValidationError(std::string(what) + ": empty list");
    return out;
}

std::string join(const std::vector<Index>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += "x";
        s += std::to_string(v[i]);
    }
    return s;
}

Index container_param_count(const TnzContainer& c) {
    return std::visit(
        [](const auto& payload) -> Index {
            using T = std::decay_t<decltype(payload)>;
            Index count = 0;
            if constexpr (std::is_same_v<T, KruskalTensor>) {
                count += payload.weights.size();
                for (const auto& f : payload.factors) count += f.size();
            } else if constexpr (std::is_same_v<T, TuckerTensor>) {
                count += payload.core.size();
                for (const auto& f : payload.factors) count += f.size();
            } else {
                for (const auto& core : payload.cores()) count += core.size();
            }
            return count;
        },
        c.payload);
}

std::vector<Index> container_ranks(const TnzContainer& c) {
    return std::visit(
        [](const auto& payload) -> std::vector<Index> {
            using T = std::decay_t<decltype(payload)>;
            if constexpr (std::is_same_v<T, KruskalTensor>) {
                return {payload.rank()};
            } else if constexpr (std::is_same_v<T, TuckerTensor>) {
                return payload.ranks();
            } else {
                return payload.ranks();
            }
        },
        c.payload);
}

struct CompressArgs {
    std::string format = "tt";
    double eps = 1e-8;
    Index max_rank = 0;  // 0 = unlimited
    std::uint64_t seed = 0;
    Index base = 2;
    std::string input, output;
};

int run_compress(const CompressArgs& a) {
    DenseTensor t = read_dense(a.input);
    const double eps_abs = a.eps * t.norm();
    std::optional<Index> cap;
    if (a.max_rank > 0) cap = a.max_rank;

    TnzContainer c;
    c.original_shape = t.shape();
    c.eps = a.eps;
    if (a.format == "tt") {
        c.format = TnzFormat::tt;
        c.payload = tt_svd(t, eps_abs, cap);
    } else if (a.format == "qtt") {
        QuantizationPlan plan = make_plan(t.shape(), a.base);
        if (!plan.has_gain())
            std::cout << "note: no quantization gain (prime or unit mode sizes)\n";
        auto [tt, used_plan] = qtt_compress(t, plan, eps_abs, cap);
        c.format = TnzFormat::tt;
        c.plan = used_plan;
        c.payload = std::move(tt);
    } else if (a.format == "tucker") {
        c.format = TnzFormat::tucker;
        TuckerTensor tk = sthosvd(t, eps_abs);
        if (cap) {
            std::vector<Index> ranks = tk.ranks();
            for (auto& r : ranks) r = std::min(r, *cap);
            tk = sthosvd_ranks(t, ranks);
        }
        c.payload = std::move(tk);
    } else if (a.format == "cp") {
        if (!cap)
            throw CLI::ValidationError("compress --format cp requires --max-rank (the CP rank)");
        c.format = TnzFormat::cp;
        CpAlsOptions opts;
        opts.seed = a.seed;
        opts.restarts = 3;
        c.payload = cp_als(t, *cap, opts).model;
    } else {
        throw CLI::ValidationError("unknown compress format: " + a.format);
    }
    write_tnz(a.output, c);
    std::cout << "compressed " << a.input << " -> " << a.output << " (" << a.format
              << ", eps " << a.eps << ")\n";
    return 0;
}

int run_info(const std::string& path, bool as_json) {
    TnzContainer c = read_tnz(path);
    const Index params = container_param_count(c);
    const Index dense_count = c.original_shape.count();
    const double ratio = static_cast<double>(dense_count) / static_cast<double>(params);
    const auto ranks = container_ranks(c);
    if (as_json) {
        nlohmann::json j;
        j["format"] = tnz_format_name(c.format);
        j["order"] = c.original_shape.order();
        j["dims"] = c.original_shape.dims();
        j["ranks"] = ranks;
        j["param_count"] = params;
        j["compression_ratio"] = ratio;
        j["eps"] = c.eps;
        j["quantized"] = c.plan.has_value();
        if (c.plan) {
            std::vector<Index> qdims = c.plan->quantized_shape().dims();
            j["quantized_dims"] = qdims;
        }
        std::cout << j.dump() << "\n";
        return 0;
    }
    std::cout << "format: " << tnz_format_name(c.format) << "\n";
    std::cout << "order: " << c.original_shape.order() << "\n";
    std::cout << "dims: " << join(c.original_shape.dims()) << "\n";
    std::cout << "ranks: " << join(ranks) << "\n";
    std::cout << "param_count: " << params << "\n";
    std::cout << "compression_ratio: " << ratio << "\n";
    std::cout << "eps: " << c.eps << "\n";
    if (c.plan) std::cout << "quantized_dims: " << join(c.plan->quantized_shape().dims()) << "\n";
    return 0;
}

int run_verify(const std::string& dense_path, const std::string& tnz_path, bool as_json) {
    DenseTensor t = read_dense(dense_path);
    TnzContainer c = read_tnz(tnz_path);
    DenseTensor approx = tnz_densify(c);
    if (approx.shape() != t.shape())
        throw IoError(IoCode::rank_chain, "verify: container shape does not match dense input");
    const double abs_err = (t.as_vector() - approx.as_vector()).norm();
    const double t_norm = t.norm();
    const double rel_err = (t_norm > 0.0) ? abs_err / t_norm : abs_err;
    const bool pass = rel_err <= c.eps;
    if (as_json) {
        nlohmann::json j;
        j["abs_error"] = abs_err;
        j["rel_error"] = rel_err;
        j["eps"] = c.eps;
        j["dense_norm"] = t_norm;
        j["pass"] = pass;
        std::cout << j.dump() << "\n";
    } else {
        std::cout << "abs_error: " << abs_err << "\n";
        std::cout << "rel_error: " << rel_err << "\n";
        std::cout << "eps: " << c.eps << "\n";
        std::cout << "dense_norm: " << t_norm << "\n";
        std::cout << (pass ? "PASS" : "FAIL") << "\n";
    }
    return pass ? 0 : 3;
}

TTTensor expect_tt(const TnzContainer& c, const char* who) {
    if (c.format != TnzFormat::tt || !std::holds_alternative<TTTensor>(c.payload))
        throw CLI::ValidationError(std::string(who) + ": operand is not a TT container");
    return std::get<TTTensor>(c.payload);
}

int run_op(const std::string& op, const std::string& a_path, const std::string& b_path,
           const std::string& out_path, double round_eps) {
    TnzContainer ca = read_tnz(a_path);
    TnzContainer cb = read_tnz(b_path);
    std::optional<double> fuse;
    if (round_eps > 0.0) fuse = round_eps;

    if (op == "inner") {
        double value = 0.0;
        if (ca.format == TnzFormat::tt && cb.format == TnzFormat::tt) {
            value = tt_inner(std::get<TTTensor>(ca.payload), std::get<TTTensor>(cb.payload));
        } else if (ca.format == TnzFormat::tucker && cb.format == TnzFormat::tucker) {
            value = tucker_inner(std::get<TuckerTensor>(ca.payload),
                                 std::get<TuckerTensor>(cb.payload));
        } else if (ca.format == TnzFormat::cp && cb.format == TnzFormat::cp) {
            value = tt_inner(cp_to_tt(std::get<KruskalTensor>(ca.payload)),
                             cp_to_tt(std::get<KruskalTensor>(cb.payload)));
        } else {
            throw CLI::ValidationError("op inner: unsupported operand formats");
        }
        std::cout << std::setprecision(17) << value << "\n";
        return 0;
    }

    if (out_path.empty()) throw CLI::ValidationError("op " + op + " requires -o output");

    TnzContainer out;
    out.eps = std::max(ca.eps, cb.eps);
    if (op == "add" || op == "hadamard") {
        if (ca.format == TnzFormat::tt && cb.format == TnzFormat::tt) {
            if (ca.plan.has_value() != cb.plan.has_value() ||
                (ca.plan && ca.plan->mode_factors != cb.plan->mode_factors))
                throw CLI::ValidationError("op " + op + ": operands use different quantizations");
            TTTensor x = std::get<TTTensor>(ca.payload);
            TTTensor y = std::get<TTTensor>(cb.payload);
            TTTensor z = (op == "add") ? tt_add(x, y) : tt_hadamard(x, y);
            if (fuse) z = tt_round(z, *fuse);
            out.format = TnzFormat::tt;
            out.plan = ca.plan;
            out.original_shape = ca.original_shape;
            out.payload = std::move(z);
        } else if (ca.format == TnzFormat::tucker && cb.format == TnzFormat::tucker) {
            const auto& x = std::get<TuckerTensor>(ca.payload);
            const auto& y = std::get<TuckerTensor>(cb.payload);
            out.format = TnzFormat::tucker;
            out.original_shape = ca.original_shape;
            out.payload = (op == "add") ? tucker_add(x, y) : tucker_hadamard(x, y);
        } else {
            throw CLI::ValidationError("op " + op + ": unsupported operand formats");
        }
    } else if (op == "matvec") {
        if (ca.format != TnzFormat::mpo)
            throw CLI::ValidationError("op matvec: first operand must be an MPO container");
        TTTensor x = expect_tt(cb, "op matvec");
        const auto& a = std::get<TTMatrix>(ca.payload);
        TTTensor y = mpo_apply(a, x, fuse);
        out.format = TnzFormat::tt;
        out.original_shape = y.shape();
        out.payload = std::move(y);
    } else {
        throw CLI::ValidationError("unknown op: " + op);
    }
    write_tnz(out_path, out);
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"tensor network toolkit: compressed tensor formats and algorithms"};
    app.require_subcommand(1);

    // compress
    CompressArgs ca;
    auto* compress = app.add_subcommand("compress", "compress a dense .dt into a .tnz network");
    compress->add_option("--format", ca.format, "tt|qtt|tucker|cp")->default_str("tt");
    compress->add_option("--eps", ca.eps, "relative Frobenius accuracy")->required();
    compress->add_option("--max-rank", ca.max_rank, "rank cap (CP: the rank)");
    compress->add_option("--seed", ca.seed, "seed for randomized paths");
    compress->add_option("--base", ca.base, "quantization base for qtt");
    compress->add_option("input", ca.input, "input .dt")->required();
    compress->add_option("output", ca.output, "output .tnz")->required();

    // decompress
    std::string d_in, d_out;
    auto* decompress = app.add_subcommand("decompress", "expand a .tnz back to a dense .dt");
    decompress->add_option("input", d_in)->required();
    decompress->add_option("output", d_out)->required();

    // round
    double r_eps = 0.0;
    Index r_max_rank = 0;
    std::string r_in, r_out;
    auto* round = app.add_subcommand("round", "recompress a TT/MPO container");
    round->add_option("--eps", r_eps, "relative accuracy")->required();
    round->add_option("--max-rank", r_max_rank, "rank cap");
    round->add_option("input", r_in)->required();
    round->add_option("output", r_out)->required();

    // ortho
    Index o_center = 1;
    std::string o_in, o_out;
    auto* ortho = app.add_subcommand("ortho", "orthogonalize a TT container around a core");
    ortho->add_option("--center", o_center, "1-based orthogonality center")->required();
    ortho->add_option("input", o_in)->required();
    ortho->add_option("output", o_out)->required();

    // info
    std::string i_in;
    bool i_json = false;
    auto* info = app.add_subcommand("info", "describe a .tnz container");
    info->add_option("input", i_in)->required();
    info->add_flag("--json", i_json, "machine-readable output");

    // op
    std::string op_name, op_a, op_b, op_out;
    double op_round_eps = 0.0;
    auto* op = app.add_subcommand("op", "compressed arithmetic on containers");
    op->add_option("name", op_name, "add|hadamard|inner|matvec")->required();
    op->add_option("a", op_a)->required();
    op->add_option("b", op_b)->required();
    op->add_option("-o,--output", op_out);
    op->add_option("--round-eps", op_round_eps, "round the result at this accuracy");

    // gen
    std::string g_kind, g_dims, g_ranks, g_out;
    std::uint64_t g_seed = 0;
    double g_rho = 0.9;
    auto* gen = app.add_subcommand("gen", "generate a synthetic dense tensor");
    gen->add_option("--kind", g_kind, "rand-tt|rand-tucker|rank1|hilbert|ramp|geometric")->required();
    gen->add_option("--dims", g_dims, "comma-separated mode sizes")->required();
    gen->add_option("--ranks", g_ranks, "comma-separated ranks (rand-tt/rand-tucker)");
    gen->add_option("--seed", g_seed);
    gen->add_option("--rho", g_rho, "geometric ratio");
    gen->add_option("output", g_out)->required();

    // verify
    std::string v_dense, v_tnz;
    bool v_json = false;
    auto* verify = app.add_subcommand("verify", "compare a .tnz against its dense oracle");
    verify->add_option("dense", v_dense)->required();
    verify->add_option("tnz", v_tnz)->required();
    verify->add_flag("--json", v_json);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*compress) return run_compress(ca);
        if (*decompress) {
            write_dense(d_out, tnz_densify(read_tnz(d_in)));
            std::cout << "wrote " << d_out << "\n";
            return 0;
        }
        if (*round) {
            TnzContainer c = read_tnz(r_in);
            std::optional<Index> cap;
            if (r_max_rank > 0) cap = r_max_rank;
            if (c.format == TnzFormat::tt) {
                c.payload = tt_round(std::get<TTTensor>(c.payload), r_eps, cap);
            } else if (c.format == TnzFormat::mpo) {
                c.payload = mpo_round(std::get<TTMatrix>(c.payload), r_eps, cap);
            } else {
                throw CLI::ValidationError("round: only TT and MPO containers can be rounded");
            }
            write_tnz(r_out, c);
            std::cout << "wrote " << r_out << "\n";
            return 0;
        }
        if (*ortho) {
            TnzContainer c = read_tnz(o_in);
            if (c.format != TnzFormat::tt)
                throw CLI::ValidationError("ortho: only TT containers");
            const auto& tt = std::get<TTTensor>(c.payload);
            if (o_center < 1 || o_center > tt.order())
                throw CLI::ValidationError("ortho: center out of range");
            c.payload = tt_orthogonalize(tt, o_center - 1);
            write_tnz(o_out, c);
            std::cout << "wrote " << o_out << "\n";
            return 0;
        }
        if (*info) return run_info(i_in, i_json);
        if (*op) return run_op(op_name, op_a, op_b, op_out, op_round_eps);
        if (*gen) {
            SyntheticParams params;
            params.dims = parse_csv(g_dims, "--dims");
            if (!g_ranks.empty()) params.ranks = parse_csv(g_ranks, "--ranks");
            params.seed = g_seed;
            params.rho = g_rho;
            DenseTensor t = gen_synthetic(synthetic_kind_from_name(g_kind), params);
            write_dense(g_out, t);
            std::cout << "wrote " << g_out << " (" << join(params.dims) << ")\n";
            return 0;
        }
        if (*verify) return run_verify(v_dense, v_tnz, v_json);
    } catch (const CLI::ValidationError& e) {
        std::cout << "error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        std::cout << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cout << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cout << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

}  // namespace tnt
