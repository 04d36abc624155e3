// Command-line front end; talks to the library through the C API only.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <json.hpp>
#include <sepkern/sepkern.h>

namespace {

struct Options {
    std::string scenario_file;
    std::string json_out;
    double tol = 0.0;       // 0: keep scenario value
    long seed = -1;         // <0: keep scenario value
    int quad_nodes = 0;
    std::string reproduce_id;
};

int fail(const std::string& msg) {
    std::cerr << "error: " << msg << "\n";
    return 2;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_json_out(const Options& opt, const char* report) {
    if (opt.json_out.empty() || !report) return;
    std::ofstream out(opt.json_out);
    out << report << "\n";
}

int run_scenario_command(const std::string& command, const Options& opt) {
    std::string text;
    try {
        text = read_file(opt.scenario_file);
    } catch (const std::exception& e) {
        return fail(e.what());
    }

    // apply CLI overrides to the scenario options before handing it over
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        return fail(std::string("scenario parse: ") + e.what());
    }
    if (opt.tol > 0.0) j["options"]["tol"] = opt.tol;
    if (opt.seed >= 0) j["options"]["seed"] = static_cast<unsigned>(opt.seed);
    if (opt.quad_nodes > 0) j["options"]["quad_nodes"] = opt.quad_nodes;

    char* report = nullptr;
    char* human = nullptr;
    int exit_code = 2;
    const sk_status st = sk_run_scenario(j.dump().c_str(), command.c_str(), &report,
                                         &human, &exit_code);
    if (st != SK_OK) return fail(sk_last_error());
    if (human) std::cout << human << "\n";
    write_json_out(opt, report);
    sk_string_free(report);
    sk_string_free(human);
    return exit_code;
}

int run_reproduce(const Options& opt) {
    char* report = nullptr;
    char* human = nullptr;
    int exit_code = 2;
    const sk_status st =
        sk_reproduce(opt.reproduce_id.c_str(), opt.seed >= 0 ? static_cast<unsigned>(opt.seed) : 0,
                     opt.tol, &report, &human, &exit_code);
    if (st != SK_OK) return fail(sk_last_error());
    if (human) std::cout << human << "\n";
    write_json_out(opt, report);
    sk_string_free(report);
    sk_string_free(human);
    return exit_code;
}

int run_list_families(const Options& opt) {
    char* listing = nullptr;
    if (sk_list_families(&listing) != SK_OK) return fail(sk_last_error());
    const nlohmann::json j = nlohmann::json::parse(listing);
    for (const auto& f : j["families"])
        std::cout << f["id"].get<std::string>() << "  -  "
                  << f["description"].get<std::string>() << "\n";
    write_json_out(opt, listing);
    sk_string_free(listing);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(sk_version()) +
                 " - separable-kernel integral operators and covariance checks"};
    app.require_subcommand(1);

    Options opt;
    std::string selected;
    for (const char* name :
         {"pair", "compose", "power", "check", "solve_b", "solve_a", "commutator"}) {
        CLI::App* sub = app.add_subcommand(name, std::string("run a '") + name +
                                                     "' scenario file");
        sub->add_option("--scenario", opt.scenario_file, "scenario JSON file")->required();
        sub->add_option("--tol", opt.tol, "override options.tol");
        sub->add_option("--seed", opt.seed, "override options.seed");
        sub->add_option("--quad-nodes", opt.quad_nodes, "override quadrature nodes");
        sub->add_option("--json", opt.json_out, "write the JSON report to this file");
        sub->callback([&selected, name] { selected = name; });
    }

    CLI::App* rep = app.add_subcommand("reproduce", "re-run a bundled scenario family");
    rep->add_option("id", opt.reproduce_id, "family id (see list-families) or "
                                            "'case2a-detv-factorization'")
        ->required();
    rep->add_option("--tol", opt.tol, "verification tolerance (default 1e-10)");
    rep->add_option("--seed", opt.seed, "random seed for parameter draws");
    rep->add_option("--json", opt.json_out, "write the JSON report to this file");
    rep->callback([&selected] { selected = "reproduce"; });

    CLI::App* lst = app.add_subcommand("list-families", "list bundled solution families");
    lst->add_option("--json", opt.json_out, "write the JSON listing to this file");
    lst->callback([&selected] { selected = "list-families"; });

    CLI11_PARSE(app, argc, argv);

    if (selected == "reproduce") return run_reproduce(opt);
    if (selected == "list-families") return run_list_families(opt);
    return run_scenario_command(selected, opt);
}
