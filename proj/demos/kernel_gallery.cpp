// Gallery of commutator kernels.
//
// Walks through the main closed-form families: the sharp tanh pair whose
// kernel is the rank-one sech projector, the rank-n kernels at
// (2 alpha)(2 beta) = 2 pi n with their sign-indefinite spectra for n >= 2,
// and a two-atom mixture pair at a b = pi/2. For each case the program
// prints the trace against [f][g] / 2 pi and the leading eigenvalues of
// the Nystrom discretization.

#include <cstdio>

#include "commutatorlab/analysis.hpp"

using namespace commlab;

namespace {

void show(const char* title, const KatoFunction& f, const KatoFunction& g, const GridSpec& grid) {
    KernelMatrix km = nystrom_assemble(f, g, grid);
    const double expected = total_variation(f) * total_variation(g) / (2.0 * pi);
    PositivityReport rep = positivity_spectrum(km, expected);

    std::printf("%s\n", title);
    std::printf("  trace        %.12f  (expected %.12f, rel err %.2e)\n", rep.trace_computed, expected,
                std::abs(rep.trace_computed - expected) / expected);
    std::printf("  eigenvalues ");
    for (std::size_t i = 0; i < rep.top_eigenvalues.size() && i < 5; ++i)
        std::printf(" %+.6e", rep.top_eigenvalues[i]);
    std::printf("\n");
    std::printf("  min eig      %+.6e   rank %d   verdict %s\n\n", rep.min_eigenvalue, rep.numerical_rank,
                rep.psd_verdict ? "positive semidefinite" : "indefinite");
}

} // namespace

int main() {
    GridSpec grid(20.0, 512);

    std::printf("== commutator kernel gallery ==\n");
    std::printf("grid: L = %.1f, N = %d, h = %.4f\n\n", grid.L, grid.N, grid.h());

    // the self-dual pair: a = b = sqrt(pi/2), kernel (beta/pi) sech(beta x) sech(beta y)
    const double selfdual = 1.2533141373155003;
    show("tanh pair at the sharp product a b = pi/2 (rank one, trace 2/pi)",
         single_step(selfdual), single_step(selfdual), grid);

    // rank-n family: (2 alpha)(2 beta) = 2 pi n
    const double beta = 1.0;
    for (int n = 1; n <= 3; ++n) {
        const double alpha = pi * n / (2.0 * beta);
        char title[96];
        std::snprintf(title, sizeof(title), "rank-%d kernel: alpha = %.4f, beta = %.4f", n, alpha, beta);
        show(title, single_step(pi / (2.0 * alpha)), single_step(pi / (2.0 * beta)), grid);
    }

    // a mixture pair at the sharp product
    KatoFunction f;
    f.a = 1.0;
    f.measure.atoms = {{-0.7, 0.6}, {0.9, 0.4}};
    KatoFunction g;
    g.a = pi / 2.0;
    g.measure.atoms = {{0.0, 0.5}, {1.0, 0.5}};
    show("two-atom mixture pair at a b = pi/2", f, g, grid);

    // the same g widened: a b > pi/2 keeps positivity
    KatoFunction wide = g;
    wide.a = 1.25 * pi / 2.0;
    show("widened g: a b = 1.25 pi/2 (still positive)", f, wide, grid);

    return 0;
}
