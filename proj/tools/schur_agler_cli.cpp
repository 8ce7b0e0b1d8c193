// Command-line shell around schur_agler::cli::run.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "schur_agler/cli.hpp"

namespace {

std::string slurp(const std::string& path)
{
    if (path == "-")
    {
        return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
    }
    std::ifstream in(path);
    if (!in)
    {
        throw schur_agler::FieldError("--input", "cannot open '" + path + "'");
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace

int main(int argc, char** argv)
{
    using namespace schur_agler;
    namespace sc = schur_agler::cli;

    CLI::App app{"Caratheodory distances, Agler decompositions and realizations"};
    std::string command;
    std::string input  = "-";
    std::string output = "-";
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    bool show_defaults = false;

    app.add_option("command", command, "command; overrides the job's own 'command' field");
    app.add_option("--input,-i", input, "job file, or - for standard input");
    app.add_option("--output,-o", output, "result file, or - for standard output");
    app.add_option("--config,-c", config, "JSON file of setting overrides");
    app.add_option("--seed", seed, "seed for randomized suites");
    app.add_option("--parallel", threads, "worker threads for grid scans")->check(CLI::PositiveNumber);
    app.add_flag("--defaults", show_defaults, "print the default settings and exit");
    CLI11_PARSE(app, argc, argv);

    sc::Outcome outcome;
    try
    {
        sc::Config cfg;
        if (!config.empty())
        {
            const std::string text = slurp(config);
            sc::json j;
            try
            {
                j = sc::json::parse(text);
            }
            catch (const sc::json::parse_error& e)
            {
                throw FieldError("--config", std::string("malformed JSON: ") + e.what());
            }
            cfg = sc::merge(cfg, j, "config");
        }
        if (seed)
        {
            cfg.seed = *seed;
        }
        if (threads)
        {
            cfg.threads = *threads;
        }
        if (show_defaults)
        {
            outcome.output = sc::to_json(cfg);
        }
        else
        {
            // `suite` needs no job body; read stdin only when no command is given
            // or an input file was named.
            const bool need_job = command.empty() || input != "-" || command != "suite";
            outcome = sc::run_text(need_job ? slurp(input) : std::string(), cfg, command);
        }
    }
    catch (const FieldError& e)
    {
        outcome = {sc::error_object("rejected_input", e.field(), e.what()), sc::exit_rejected};
    }
    catch (const InputError& e)
    {
        outcome = {sc::error_object("rejected_input", "", e.what()), sc::exit_rejected};
    }

    const std::string text = io::dump(outcome.output) + "\n";
    if (output == "-")
    {
        std::cout << text;
    }
    else
    {
        std::ofstream out(output);
        if (!out)
        {
            std::cerr << "cannot write '" << output << "'\n";
            return sc::exit_rejected;
        }
        out << text;
    }
    return outcome.exit_code;
}
