#include "vtri/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <iterator>

int main(int argc, char** argv)
{
    CLI::App app{"Exact V-triangulation toolkit"};
    std::string command, input, output, format = "text";
    unsigned seed = 0;
    int max_subdivisions = vtri::max_subdivisions();
    std::size_t dim_cap = vtri::dimension_cap();
    std::size_t pivot_cap = vtri::lp_pivot_cap();

    app.add_option("command", command, "Command to run")->required()->check(CLI::IsMember(vtri::command_names()));
    app.add_option("--input", input, "Scene file (default: standard input)");
    app.add_option("--output", output, "Report file (default: standard output)");
    app.add_option("--seed", seed, "Seed for randomized probes");
    app.add_option("--max-subdivisions", max_subdivisions, "Bound on subdivision rounds")->check(CLI::NonNegativeNumber);
    app.add_option("--dim-cap", dim_cap, "Largest ambient dimension accepted");
    app.add_option("--pivot-cap", pivot_cap, "Pivot budget per linear program");
    app.add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "doc"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : vtri::exit_code::parse_error;
    }

    vtri::max_subdivisions() = max_subdivisions;
    vtri::dimension_cap() = dim_cap;
    vtri::lp_pivot_cap() = pivot_cap;

    std::string text;
    if (input.empty() || input == "-") {
        text.assign(std::istreambuf_iterator<char>(std::cin), {});
    } else {
        std::ifstream in(input, std::ios::binary);
        if (!in) {
            std::cerr << "error: cannot read " << input << '\n';
            return vtri::exit_code::parse_error;
        }
        text.assign(std::istreambuf_iterator<char>(in), {});
    }

    vtri::CommandResult r = vtri::run_command(command, text, {seed, format == "doc"});
    if (output.empty()) {
        std::cout << r.report;
    } else {
        std::ofstream out(output, std::ios::binary);
        out << r.report;
        if (!out) {
            std::cerr << "error: cannot write " << output << '\n';
            return vtri::exit_code::check_failed;
        }
    }
    return r.exit_code;
}
