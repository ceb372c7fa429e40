// Command-line front end: key generation, the key-exchange loopback, the
// degree-fall analysis tables and the attack demos, over the byte-exact file
// formats from olivier/serialize.hpp.

#include <CLI11.hpp>

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "olivier/olivier.hpp"

using namespace olivier;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;   // protocol or attack failure
constexpr int kExitUsage = 2;     // bad arguments or malformed input files
constexpr int kExitBudget = 3;    // resource budget exceeded

std::string to_hex(std::span<const std::uint8_t> bytes) {
    std::ostringstream os;
    os << std::hex << std::setfill('0');
    for (auto b : bytes) os << std::setw(2) << unsigned(b);
    return os.str();
}

std::uint64_t pick_seed(const std::optional<std::uint64_t>& seed) {
    if (seed) return *seed;
    std::random_device rd;
    return (std::uint64_t(rd()) << 32) | rd();
}

std::size_t worker_count() {
    if (const char* env = std::getenv("OLIVIER_THREADS")) {
        char* end = nullptr;
        unsigned long w = std::strtoul(env, &end, 10);
        if (end && *end == '\0') return std::size_t(w);  // 0 means auto
    }
    return 1;
}

Params params_from(const std::optional<std::string>& preset, std::size_t n, std::size_t v,
                   std::size_t u) {
    if (preset) {
        auto p = Params::preset(*preset);
        if (!p) throw CLI::ValidationError("unknown preset " + *preset);
        return *p;
    }
    Params p{n, v, u};
    if (!p.valid())
        throw CLI::ValidationError("invalid parameters: need 1 <= v < n - v and u >= n");
    return p;
}

// ---------------------------------------------------------------- keygen --

int cmd_keygen(const std::optional<std::string>& preset, std::size_t n, std::size_t v,
               std::size_t u, std::optional<std::uint64_t> seed, const std::string& pub_path,
               const std::string& priv_path) {
    Params p = params_from(preset, n, v, u);
    Rng rng(pick_seed(seed));
    KeyPair kp = keygen(p, rng);
    auto pub_bytes = encode_public_key(kp.pub);
    auto priv_bytes = encode_private_key(kp.priv);
    save_bytes(pub_path, pub_bytes);
    save_bytes(priv_path, priv_bytes);
    std::cout << "public key:  " << pub_bytes.size() << " bytes -> " << pub_path << '\n'
              << "private key: " << priv_bytes.size() << " bytes -> " << priv_path << '\n'
              << "params: n=" << p.n << " v=" << p.v << " u=" << p.u << " m=" << p.m() << '\n';
    return kExitOk;
}

// ------------------------------------------------------- encaps / decaps --

// Session state file (Alice side): "OLVS" || LE32(t) || LE32(n) || t records
// of ceil(n/8) plaintext bytes followed by the 32-byte confirmation hash.
void save_state(const std::string& path, const EncapsState& state, std::size_t n) {
    std::vector<std::uint8_t> out;
    out.insert(out.end(), {'O', 'L', 'V', 'S'});
    append_le32(out, std::uint32_t(state.plaintexts.size()));
    append_le32(out, std::uint32_t(n));
    for (std::size_t i = 0; i < state.plaintexts.size(); ++i) {
        auto bytes = state.plaintexts[i].to_bytes();
        out.insert(out.end(), bytes.begin(), bytes.end());
        out.insert(out.end(), state.hashes[i].begin(), state.hashes[i].end());
    }
    save_bytes(path, out);
}

int cmd_encaps(const std::string& pub_path, std::size_t t, std::optional<std::uint64_t> seed,
               const std::string& out_path, const std::optional<std::string>& state_path) {
    PublicKey pk = load_public_key(pub_path);
    SessionConfig cfg;
    cfg.t = t;
    Rng rng(pick_seed(seed));
    auto [batch, state] = encapsulate(pk, cfg, rng);
    save_batch(out_path, batch);
    if (state_path) save_state(*state_path, state, pk.params.n);
    std::cerr << "batch: t=" << batch.t << " m=" << batch.m << " -> " << out_path << '\n';
    return kExitOk;
}

int cmd_decaps(const std::string& priv_path, const std::string& batch_path, bool fast,
               std::size_t theta, std::size_t chunk, bool no_verify,
               const std::optional<std::string>& digest_path) {
    PrivateKey sk = load_private_key(priv_path);
    CipherBatch batch = load_batch(batch_path);
    SessionConfig cfg;
    cfg.t = batch.t;
    cfg.theta = theta;
    cfg.chunk = chunk;
    cfg.verify_full = !no_verify;
    cfg.workers = worker_count();
    detail::Timer timer;
    DecapResult res = fast ? decapsulate_fast(sk, batch, cfg) : decapsulate(sk, batch, cfg);
    std::cerr << "guesses_tried=" << res.guesses_tried << " column=" << res.column
              << " wall_seconds=" << timer.elapsed() << '\n';
    Digest d = confirm_digest(res.plaintext);
    if (digest_path) save_bytes(*digest_path, std::vector<std::uint8_t>(d.begin(), d.end()));
    std::cout << to_hex(d) << '\n';
    return kExitOk;
}

int cmd_kexdemo(const std::string& pub_path, const std::string& priv_path, std::size_t t,
                std::size_t theta, std::size_t chunk, bool fast, bool no_verify,
                std::optional<std::uint64_t> seed) {
    PublicKey pk = load_public_key(pub_path);
    PrivateKey sk = load_private_key(priv_path);
    SessionConfig cfg;
    cfg.t = t;
    cfg.theta = theta;
    cfg.chunk = chunk;
    cfg.verify_full = !no_verify;
    cfg.workers = worker_count();
    Rng rng(pick_seed(seed));

    auto [batch, state] = encapsulate(pk, cfg, rng);
    detail::Timer timer;
    DecapResult res = fast ? decapsulate_fast(sk, batch, cfg) : decapsulate(sk, batch, cfg);
    std::cerr << "guesses_tried=" << res.guesses_tried << " wall_seconds=" << timer.elapsed()
              << '\n';

    Digest bob = shared_secret(res.plaintext);
    auto alice = confirm(res, state);
    if (!alice || *alice != bob) {
        std::cerr << "key exchange failed: secrets disagree\n";
        return kExitFailure;
    }
    std::cout << "shared secret: " << to_hex(bob) << '\n';
    return kExitOk;
}

// --------------------------------------------------------------- analyze --

void print_sigma_table(const SigmaTable& table, bool records) {
    if (records) {
        for (int d = 3; d <= table.d_max; ++d)
            for (int i = 0; i < d; ++i) std::cout << d << ' ' << i << ' ' << table.at(d, i) << '\n';
        return;
    }
    std::cout << " d\\i";
    for (int i = 0; i < table.d_max; ++i) std::cout << std::setw(10) << i;
    std::cout << '\n';
    for (int d = 3; d <= table.d_max; ++d) {
        std::cout << std::setw(4) << d;
        for (int i = 0; i < d; ++i) {
            std::ostringstream cell;
            cell << table.at(d, i);
            std::cout << std::setw(10) << (table.at(d, i) < 0 ? cell.str() + "*" : cell.str());
        }
        std::cout << '\n';
    }
}

int cmd_analyze(std::size_t n, std::size_t v, std::size_t e, std::size_t u, int dmax, bool oracle,
                bool records, std::optional<std::uint64_t> seed, std::size_t budget_mb) {
    if (v < 1 || v >= n) throw CLI::ValidationError("need 1 <= v < n");
    AnalysisParams ap{n, v, e, u};
    SigmaTable table = sigma_table(ap, dmax);

    if (!records)
        std::cout << (u > 0 ? "sigma-tilde table" : "sigma table") << " (n=" << n << " v=" << v
                  << " e=" << e << " u=" << u << "), negative entries marked *\n";
    print_sigma_table(table, records);
    if (table.first_fall)
        std::cout << "first fall (within table): d=" << *table.first_fall << '\n';
    std::cout << "first fall estimate: d=" << first_fall_estimate(n, v, e, u) << '\n';

    SeriesPrefix gen = generic_series(n, e + u, dmax);
    std::cout << "generic series (m=" << e + u << "):";
    for (const auto& c : gen.coeffs) std::cout << ' ' << c;
    std::cout << '\n';
    std::cout << "d_reg generic: " << d_reg_generic(n, e + u) << '\n';

    if (oracle) {
        Rng rng(pick_seed(seed));
        std::vector<QuadraticPoly> polys;
        OvShape shape{n, v};
        for (std::size_t i = 0; i < e; ++i) polys.push_back(QuadraticPoly::random_ov(shape, rng));
        for (std::size_t i = 0; i < u; ++i) polys.push_back(QuadraticPoly::random_full(n, rng));
        SeriesPrefix got =
            hilbert_prefix_bruteforce(QuadraticSystem(polys), dmax, budget_mb << 20);
        std::cout << "oracle hilbert prefix:";
        for (const auto& c : got.coeffs) std::cout << ' ' << c;
        std::cout << '\n';
        // predicted: generic plus the negative sigma entries flipped in sign
        bool flagged = false;
        for (int d = 2; d <= dmax; ++d) {
            BigInt predict = gen.coeffs[std::size_t(d)];
            if (d >= 3)
                for (int i = 0; i < d; ++i)
                    if (table.at(d, i) < 0) predict -= table.at(d, i);
            if (predict != got.coeffs[std::size_t(d)]) {
                std::cout << "disagreement at degree " << d << ": predicted " << predict
                          << ", oracle " << got.coeffs[std::size_t(d)] << '\n';
                flagged = true;
            }
        }
        if (!flagged) std::cout << "oracle agrees with the sigma prediction\n";
    }
    return kExitOk;
}

// -------------------------------------------------------------- estimate --

int cmd_estimate(const std::optional<std::string>& preset, std::size_t n, std::size_t v,
                 std::size_t u, double omega, bool records) {
    Params p = params_from(preset, n, v, u);
    int dfall = first_fall_estimate(p.n, p.v, p.n, p.u);
    ComplexityEstimate mr = estimate_minrank_bits(p);
    ComplexityEstimate xl = estimate_xl_bits(p.n, dfall);
    ComplexityEstimate f4 = estimate_f4_bits(p.n, dfall, omega);
    if (records) {
        std::cout << mr.to_records() << xl.to_records() << f4.to_records();
        std::cout << "d_fall=" << dfall << '\n';
        return kExitOk;
    }
    std::cout << "   n    v   MR d_fall   XL   F4\n";
    std::cout << std::setw(4) << p.n << ' ' << std::setw(4) << p.v << ' ' << std::setw(4)
              << mr.bits << ' ' << std::setw(6) << dfall << ' ' << std::setw(4) << xl.bits << ' '
              << std::setw(4) << f4.bits << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------- attack --

int cmd_attack(const std::string& kind, const std::optional<std::string>& pub_path,
               const std::optional<std::string>& priv_path,
               const std::optional<std::string>& weaken, std::size_t n, std::size_t v,
               std::size_t u, std::uint64_t samples, std::size_t span_margin, std::size_t max_u,
               std::optional<std::uint64_t> seed) {
    Rng rng(pick_seed(seed));
    std::optional<KeyPair> generated;
    if (weaken) {
        Params p{n, v, u};
        if (*weaken == "u-equals-n") p.u = p.n;
        if (!p.valid()) throw CLI::ValidationError("invalid parameters for the weakened key");
        // the probabilistic oil-space experiments need a central map that
        // vanishes on the oil space
        generated = keygen(p, rng, KeygenOptions{.homogeneous_central = true});
        std::cerr << "generated demo key: n=" << p.n << " v=" << p.v << " u=" << p.u << '\n';
    }

    if (kind == "kernel") {
        if (!generated && !priv_path)
            throw CLI::ValidationError("kernel attack needs --priv or --weaken no-lambda");
        PrivateKey sk = generated ? generated->priv : load_private_key(*priv_path);
        std::vector<QuadraticPoly> polys;
        for (const auto& f : sk.f.polys) polys.push_back(f.compose_right_linear(sk.s));
        AttackReport rep = kernel_attack(QuadraticSystem(polys), sk.params.shape(), rng);
        std::cout << rep.to_records();
        return rep.success ? kExitOk : kExitFailure;
    }
    if (kind == "oilrecon") {
        if (!generated && !pub_path)
            throw CLI::ValidationError("oilrecon needs --pub or --weaken u-equals-n");
        PublicKey pk = generated ? generated->pub : load_public_key(*pub_path);
        AttackReport rep = oil_reconstruction(pk, span_margin, samples, rng);
        std::cout << rep.to_records();
        return rep.success ? kExitOk : kExitFailure;
    }
    if (kind == "lambdastrip") {
        if (!generated && !pub_path)
            throw CLI::ValidationError("lambdastrip needs --pub or --weaken");
        PublicKey pk = generated ? generated->pub : load_public_key(*pub_path);
        auto hit = lambda_strip_bruteforce(pk, pk.params.shape(), max_u);
        std::cout << "attack=lambdastrip\nsuccess=" << (hit ? 1 : 0) << '\n';
        if (hit) {
            std::cout << "lambda=";
            for (std::size_t j = 0; j < hit->size(); ++j) std::cout << (hit->get(j) ? '1' : '0');
            std::cout << '\n';
        }
        return hit ? kExitOk : kExitFailure;
    }
    throw CLI::ValidationError("unknown attack kind " + kind);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"OliVier multivariate key exchange toolkit"};
    app.require_subcommand(1);

    std::optional<std::string> preset;
    std::size_t n = 40, v = 10, u = 80, t = 64, theta = 8, chunk = 8;
    std::optional<std::uint64_t> seed;
    std::string pub_path = "olivier.pub", priv_path = "olivier.key";
    std::string batch_path = "batch.olvb";
    std::optional<std::string> state_path, digest_path;
    bool fast = false, no_verify = false, oracle = false, records = false;
    std::size_t e_count = 25, u_count = 0, budget_mb = 2048, span_margin = 5, max_u = 24;
    int dmax = 4;
    std::uint64_t samples = 100000;
    std::string attack_kind;
    std::optional<std::string> weaken, attack_pub, attack_priv;
    double omega = 2.37;

    auto* kg = app.add_subcommand("keygen", "generate a key pair");
    kg->add_option("--preset", preset, "SL1, SL2 or SL3");
    kg->add_option("--n", n);
    kg->add_option("--v", v);
    kg->add_option("--u", u);
    kg->add_option("--seed", seed, "deterministic rng seed");
    kg->add_option("--pub", pub_path, "public key output path");
    kg->add_option("--priv", priv_path, "private key output path");

    auto* en = app.add_subcommand("encaps", "encapsulate a ciphertext batch");
    en->add_option("--pub", pub_path)->required();
    en->add_option("--t", t, "batch size, multiple of 64");
    en->add_option("--seed", seed);
    en->add_option("--out", batch_path, "batch output path");
    en->add_option("--state", state_path, "session state output (plaintexts + hashes)");

    auto* de = app.add_subcommand("decaps", "decrypt a ciphertext batch");
    de->add_option("--priv", priv_path)->required();
    de->add_option("--batch", batch_path)->required();
    de->add_flag("--fast", fast, "use the Gray-table / theta-abort path");
    de->add_option("--theta", theta);
    de->add_option("--s", chunk, "Gray chunk width");
    de->add_flag("--no-verify", no_verify, "skip the full P(x) = b_k re-check");
    de->add_option("--digest-out", digest_path, "write the 32-byte confirmation digest");

    auto* kx = app.add_subcommand("kexdemo", "full loopback exchange");
    kx->add_option("--pub", pub_path)->required();
    kx->add_option("--priv", priv_path)->required();
    kx->add_option("--t", t);
    kx->add_option("--theta", theta);
    kx->add_option("--s", chunk);
    kx->add_flag("--fast", fast);
    kx->add_flag("--no-verify", no_verify);
    kx->add_option("--seed", seed);

    auto* an = app.add_subcommand("analyze", "degree-fall tables and Hilbert series");
    an->add_option("--n", n)->required();
    an->add_option("--v", v)->required();
    an->add_option("--e", e_count, "OV equation count")->required();
    an->add_option("--u", u_count, "fully quadratic equation count");
    an->add_option("--dmax", dmax);
    an->add_flag("--oracle", oracle, "run the brute-force Macaulay oracle");
    an->add_flag("--records", records, "machine-readable d i value lines");
    an->add_option("--seed", seed);
    an->add_option("--budget-mb", budget_mb, "oracle memory budget in MiB");

    auto* es = app.add_subcommand("estimate", "attack complexity estimates");
    es->add_option("--preset", preset);
    es->add_option("--n", n);
    es->add_option("--v", v);
    es->add_option("--u", u);
    es->add_option("--omega", omega, "linear algebra exponent");
    es->add_flag("--records", records);

    auto* at = app.add_subcommand("attack", "run an attack demo");
    at->add_option("kind", attack_kind, "kernel | oilrecon | lambdastrip")->required();
    at->add_option("--pub", attack_pub);
    at->add_option("--priv", attack_priv);
    at->add_option("--weaken", weaken, "no-lambda | u-equals-n (generate a demo key)");
    at->add_option("--n", n);
    at->add_option("--v", v);
    at->add_option("--u", u);
    at->add_option("--samples", samples, "sampling budget");
    at->add_option("--span-margin", span_margin);
    at->add_option("--max-u", max_u, "lambdastrip enumeration cap");
    at->add_option("--seed", seed);

    try {
        app.parse(argc, argv);
        if (*kg) return cmd_keygen(preset, n, v, u, seed, pub_path, priv_path);
        if (*en) return cmd_encaps(pub_path, t, seed, batch_path, state_path);
        if (*de) return cmd_decaps(priv_path, batch_path, fast, theta, chunk, no_verify, digest_path);
        if (*kx) return cmd_kexdemo(pub_path, priv_path, t, theta, chunk, fast, no_verify, seed);
        if (*an) return cmd_analyze(n, v, e_count, u_count, dmax, oracle, records, seed, budget_mb);
        if (*es) return cmd_estimate(preset, n, v, u, omega, records);
        if (*at)
            return cmd_attack(attack_kind, attack_pub, attack_priv, weaken, n, v, u, samples,
                              span_margin, max_u, seed);
        return kExitUsage;
    } catch (const CLI::ParseError& err) {
        if (err.get_exit_code() == 0) return app.exit(err);  // --help
        app.exit(err);
        return kExitUsage;
    } catch (const BudgetExceeded& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitBudget;
    } catch (const ExhaustedError& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitFailure;
    } catch (const ParseError& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitFailure;
    } catch (const std::invalid_argument& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitFailure;
    }
}
