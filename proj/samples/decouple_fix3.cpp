// Decouples the two-state plant in samples/fix3.json from code and prints the
// compensator, the closed-loop spectrum and a few transfer samples.

#include <iostream>

#include "ddp/io.hpp"

int main(int argc, char** argv)
{
    using namespace ddp;
    const std::string path = argc > 1 ? argv[1] : DDP_SAMPLE_DIR "/fix3.json";
    const io::ProblemFile file = io::parse_problem(path);

    const FeasibilityReport rep = analyze_p1(file.sys);
    for (const auto& c : rep.conditions) std::cout << c.label << ' ' << to_string(c.status) << '\n';

    const SolveResult res = solve(file.sys, ProblemKind::p1);
    const Eigen::IOFormat fmt(6, 0, ", ", "\n", "  [", "]");
    std::cout << "K =\n" << res.K.format(fmt) << "\nA_c =\n" << res.compensator.A_c.format(fmt) << "\nB_c =\n"
              << res.compensator.B_c.format(fmt) << "\nC_c =\n" << res.compensator.C_c.format(fmt) << "\nD_c =\n"
              << res.compensator.D_c.format(fmt) << '\n';

    std::cout << "closed-loop eigenvalues:";
    for (const auto& z : eigenvalues(res.loop.A_hat)) std::cout << ' ' << z;
    std::cout << "\nmax |G_zw| over samples: " << res.transfer_max << '\n';
    return res.certificate.valid() ? 0 : 1;
}
