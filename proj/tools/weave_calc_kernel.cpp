// The calc kernel speaking the wire protocol over stdin/stdout.

#include "weave/calc.hpp"
#include "weave/diagnostics.hpp"

#include <iostream>
#include <string>

int main()
{
    std::ios::sync_with_stdio(false);
    weave::calc::CalcKernel kernel;
    std::string line;
    while (!kernel.finished() && std::getline(std::cin, line)) {
        if (line.empty())
            continue;
        try {
            for (const auto &reply : kernel.handle(line))
                std::cout << reply << '\n';
            std::cout.flush();
        } catch (const weave::Error &e) {
            std::cerr << "weave-calc-kernel: " << e.message() << '\n';
            return 1;
        }
    }
    return 0;
}
