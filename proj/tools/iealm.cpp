// Command-line workbench: encrypt/decrypt images, run the chosen-plaintext
// attack against a local or remote oracle, serve an oracle, build functional
// graphs of the quantized map, and print key-space numbers.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "iealm/analysis.hpp"
#include "iealm/attack.hpp"
#include "iealm/cipher.hpp"
#include "iealm/lclm.hpp"
#include "iealm/oracle.hpp"

#include <filesystem>

using namespace iealm;

namespace {

ChannelSums parse_sums(const std::string& text) {
    ChannelSums sums;
    if (std::sscanf(text.c_str(), "%lu,%lu,%lu", &sums.x_r, &sums.y_g, &sums.z_b) != 3)
        throw CLI::ValidationError("--sums", "expected XR,YG,ZB");
    return sums;
}

std::pair<int, int> parse_size(const std::string& text) {
    int m = 0, n = 0;
    if (std::sscanf(text.c_str(), "%dx%d", &m, &n) != 2 || m < 1 || n < 1)
        throw CLI::ValidationError("--size", "expected MxN, e.g. 256x256");
    return {m, n};
}

void check_b(double b) {
    if (!(b >= 1.69 && b < 2.0))
        throw CLI::ValidationError("--b", "control parameter must be in [1.69, 2)");
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << text;
}

int cmd_encrypt(const std::string& in, const std::string& out, double b,
                const std::string& sums_text, bool faithful) {
    check_b(b);
    const Image img = load_image(in);
    if (img.channels != 3)
        throw ContractViolation("encrypt: input must be a 3-channel image");
    ChannelSums sums;
    if (faithful) {
        sums = channel_sums(img);
        std::cout << "derived sums: " << sums.x_r << "," << sums.y_g << ","
                  << sums.z_b << "\n";
    } else {
        sums = parse_sums(sums_text);
    }
    save_image(encrypt_rgb(img, b, sums), out);
    return 0;
}

int cmd_decrypt(const std::string& in, const std::string& out, double b,
                const std::string& sums_text) {
    check_b(b);
    const Image img = load_image(in);
    if (img.channels != 3)
        throw ContractViolation("decrypt: input must be a 3-channel image");
    save_image(decrypt_rgb(img, b, parse_sums(sums_text)), out);
    return 0;
}

int cmd_attack(const std::string& oracle_spec, double b, const std::string& sums_text,
               const std::string& size_text, bool packing, bool adaptive,
               const std::string& report_path, const std::string& eqkey_out,
               const std::string& eqkey_in, const std::string& decrypt_path,
               const std::string& decrypt_out) {
    EquivalentKey eq;
    if (!eqkey_in.empty()) {
        // replay: decrypt with a saved key, no oracle contact
        eq = EquivalentKey::load(eqkey_in);
        std::cout << "loaded equivalent key for " << eq.height << "x" << eq.width
                  << "\n";
    } else {
        std::unique_ptr<Oracle> oracle;
        std::unique_ptr<LocalOracle> local;
        if (oracle_spec == "local") {
            check_b(b);
            const auto [m, n] = parse_size(size_text);
            OracleConfig cfg;
            cfg.mode = OracleMode::Frozen;
            cfg.key = {b, parse_sums(sums_text)};
            cfg.height = m;
            cfg.width = n;
            local = std::make_unique<LocalOracle>(cfg);
        } else {
            oracle = connect_oracle(oracle_spec);
        }
        Oracle& target = local ? static_cast<Oracle&>(*local) : *oracle;
        AttackOptions opt;
        opt.packing = packing;
        opt.adaptive_v_low = adaptive;
        ChosenPlaintextAttack attack(target, opt);
        eq = attack.run();
        const AttackReport report = attack.report();
        std::cout << report.to_json();
        if (!report_path.empty()) write_text(report_path, report.to_json());
        if (!eqkey_out.empty()) {
            eq.save(eqkey_out);
            std::cout << "equivalent key written to " << eqkey_out << "\n";
        }
    }
    if (!decrypt_path.empty()) {
        const Image cipher = load_image(decrypt_path);
        const Image plain = recover_plaintext(cipher, eq);
        const std::string out_path =
            decrypt_out.empty() ? decrypt_path + ".recovered.ppm" : decrypt_out;
        save_image(plain, out_path);
        std::cout << "recovered plain-image written to " << out_path << "\n";
    }
    return 0;
}

int cmd_serve(const std::string& listen, double b, const std::string& sums_text,
              const std::string& size_text, const std::string& mode) {
    check_b(b);
    const auto [m, n] = parse_size(size_text);
    OracleConfig cfg;
    cfg.mode = (mode == "faithful") ? OracleMode::Faithful : OracleMode::Frozen;
    cfg.key = {b, parse_sums(sums_text)};
    cfg.height = m;
    cfg.width = n;
    const auto [host, port] = parse_endpoint(listen);
    LocalOracle oracle(cfg);
    TcpListener listener(host, port);
    std::cout << "oracle (" << mode << ", " << m << "x" << n << ") listening on "
              << host << ":" << listener.port() << std::endl;
    serve(listener, oracle);
    return 0;
}

int cmd_graph(int n, const std::string& b, const std::string& quantizer,
              const std::string& dot_path, const std::string& json_path) {
    Quantizer q = Quantizer::Floor;
    if (quantizer == "round")
        q = Quantizer::Round;
    else if (quantizer == "ceil")
        q = Quantizer::Ceil;
    else if (quantizer != "floor")
        throw CLI::ValidationError("--quantizer", "must be floor, round or ceil");
    const QuantizedMapConfig cfg = make_quantized_config(n, b, q);
    const FunctionalGraph g = build_functional_graph(cfg);
    const GraphStats stats = graph_stats(g);
    nlohmann::json summary{
        {"n", n},
        {"nodes", g.node_count()},
        {"component_count", stats.component_count},
        {"cycle_count", stats.cycle_count},
        {"cycle_lengths", stats.cycle_lengths},
        {"max_transient_length", stats.max_transient_length},
        {"self_loop_nodes", stats.self_loop_nodes},
    };
    std::cout << summary.dump(2) << "\n";
    if (!dot_path.empty()) write_text(dot_path, graph_to_dot(g));
    if (!json_path.empty()) write_text(json_path, graph_to_json(g, stats));
    return 0;
}

int cmd_keyspace(unsigned l, unsigned m, unsigned n, const std::string& json_path) {
    const std::string count = key_count(m, n);
    const std::string size = key_space_size({l}, m, n);
    const auto [exponent, exact] = log2_decimal(size);
    nlohmann::json j{
        {"L", l},
        {"M", m},
        {"N", n},
        {"key_count", count},
        {"key_space_size", size},
        {"key_space_log2", exponent},
        {"key_space_log2_exact", exact},
    };
    std::cout << j.dump(2) << "\n";
    if (!json_path.empty()) write_text(json_path, j.dump(2) + "\n");
    return 0;
}

int cmd_corpus(const std::string& dir, double bin_width, const std::string& json_path) {
    std::vector<Image> images;
    std::vector<std::string> paths;
    if (std::filesystem::is_directory(dir)) {
        for (const auto& entry : std::filesystem::directory_iterator(dir)) {
            const std::string p = entry.path().string();
            if (p.size() >= 4 && (p.ends_with(".ppm") || p.ends_with(".pgm")))
                paths.push_back(p);
        }
        std::sort(paths.begin(), paths.end());
        for (const auto& p : paths) images.push_back(load_image(p));
    }
    const CorpusReport report = corpus_means(images, bin_width);  // throws EmptyCorpus
    nlohmann::json j = nlohmann::json::parse(report.to_json());
    j["paths"] = paths;
    std::cout << j.dump(2) << "\n";
    if (!json_path.empty()) write_text(json_path, j.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"IEALM cipher, cryptanalysis and key-space workbench"};
    app.require_subcommand(1);

    std::string in, out, sums_text = "0,0,0", size_text = "256x256";
    double b = 1.99;
    bool faithful = false;

    auto* enc = app.add_subcommand("encrypt", "encrypt an RGB image");
    enc->add_option("--in", in, "input image (PPM/raw)")->required();
    enc->add_option("--out", out, "output image path")->required();
    enc->add_option("--b", b, "control parameter in [1.69, 2)");
    enc->add_option("--sums", sums_text, "frozen channel sums XR,YG,ZB");
    enc->add_flag("--faithful", faithful, "derive sums from the plain-image");

    auto* dec = app.add_subcommand("decrypt", "decrypt an RGB image");
    dec->add_option("--in", in, "input cipher-image")->required();
    dec->add_option("--out", out, "output image path")->required();
    dec->add_option("--b", b, "control parameter in [1.69, 2)");
    dec->add_option("--sums", sums_text, "channel sums XR,YG,ZB")->required();

    std::string oracle_spec = "local", report_path, eqkey_out, eqkey_in;
    std::string decrypt_path, decrypt_out;
    bool packing = true, adaptive = false;
    auto* att = app.add_subcommand("attack", "run the chosen-plaintext attack");
    att->add_option("--oracle", oracle_spec, "'local' or host:port");
    att->add_option("--b", b, "local oracle control parameter");
    att->add_option("--sums", sums_text, "local oracle frozen sums");
    att->add_option("--size", size_text, "local oracle dimensions MxN");
    att->add_flag("--packing,!--no-packing", packing,
                  "pack three payloads per RGB query (default on)");
    att->add_flag("--adaptive-vl", adaptive, "bisection V_L search");
    att->add_option("--report", report_path, "write the attack report JSON here");
    att->add_option("--save-eqkey", eqkey_out, "write the equivalent key here");
    att->add_option("--eqkey", eqkey_in, "replay a saved equivalent key (no queries)");
    att->add_option("--decrypt", decrypt_path, "cipher-image to decrypt afterwards");
    att->add_option("--out", decrypt_out, "where to write the recovered image");

    std::string listen = "127.0.0.1:9000", mode = "frozen";
    auto* srv = app.add_subcommand("serve", "serve an encryption oracle over TCP");
    srv->add_option("--listen", listen, "host:port to bind");
    srv->add_option("--b", b, "control parameter");
    srv->add_option("--sums", sums_text, "frozen channel sums");
    srv->add_option("--size", size_text, "image dimensions MxN");
    srv->add_option("--mode", mode, "frozen|faithful");

    int gn = 3;
    std::string gb = "511/256", quantizer = "floor", dot_path, gjson_path;
    auto* gr = app.add_subcommand("graph", "functional graph of the quantized z-map");
    gr->add_option("--n", gn, "fractional bits (1..16)");
    gr->add_option("--b", gb, "control parameter as rational or decimal");
    gr->add_option("--quantizer", quantizer, "floor|round|ceil");
    gr->add_option("--dot", dot_path, "write DOT export here");
    gr->add_option("--json", gjson_path, "write JSON export here");

    unsigned kl = 64, km = 256, kn = 256;
    std::string kjson_path;
    auto* ks = app.add_subcommand("keyspace", "key count and key-space size");
    ks->add_option("--L", kl, "arithmetic precision in bits");
    ks->add_option("--M", km, "image rows");
    ks->add_option("--N", kn, "image columns");
    ks->add_option("--json", kjson_path, "write the report here");

    std::string corpus_dir;
    double bin_width = 8.0;
    std::string cjson_path;
    auto* co = app.add_subcommand("corpus", "per-channel mean statistics of images");
    co->add_option("--dir", corpus_dir, "directory of PPM/PGM files")->required();
    co->add_option("--bin-width", bin_width, "histogram bin width");
    co->add_option("--json", cjson_path, "write the report here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*enc) return cmd_encrypt(in, out, b, sums_text, faithful);
        if (*dec) return cmd_decrypt(in, out, b, sums_text);
        if (*att)
            return cmd_attack(oracle_spec, b, sums_text, size_text, packing, adaptive,
                              report_path, eqkey_out, eqkey_in, decrypt_path,
                              decrypt_out);
        if (*srv) return cmd_serve(listen, b, sums_text, size_text, mode);
        if (*gr) return cmd_graph(gn, gb, quantizer, dot_path, gjson_path);
        if (*ks) return cmd_keyspace(kl, km, kn, kjson_path);
        if (*co) return cmd_corpus(corpus_dir, bin_width, cjson_path);
    } catch (const NonBijectiveRecovery& e) {
        std::cerr << "attack failed: " << e.what() << "\n"
                  << "(a faithful oracle rederives its keystream per query; the "
                     "attack requires the frozen-sequence premise)\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
