#include "imlambda/config.hpp"
#include "imlambda/dispatch.hpp"
#include "imlambda/errors.hpp"
#include "imlambda/execution.hpp"
#include "imlambda/version.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Impedance-matched Lambda system toolkit"};
    app.set_version_flag("--version", std::string(imlambda::kVersion));
    std::string config_path, out_dir = ".";
    int threads = 0;
    bool quiet = false, schema = false;
    app.add_option("--config", config_path, "configuration file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "OpenMP threads (0: runtime default)")->check(CLI::NonNegativeNumber);
    app.add_flag("--quiet", quiet, "suppress progress output");
    app.add_flag("--schema", schema, "print the configuration schema and exit");
    std::string command;
    app.add_option("command", command, "subcommand")->check(CLI::IsMember(imlambda::subcommands()));
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }
    if (schema) {
        std::cout << imlambda::config_schema();
        return 0;
    }
    if (command.empty() || config_path.empty()) {
        std::cerr << "error: a subcommand and --config are required\n" << app.help();
        return 1;
    }
    try {
        if (threads > 0) imlambda::set_threads(threads);
        const imlambda::RunConfig config = imlambda::load_config(config_path);
        imlambda::dispatch(command, config, out_dir, quiet ? nullptr : &std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return imlambda::exit_code(e);
    }
    return 0;
}
