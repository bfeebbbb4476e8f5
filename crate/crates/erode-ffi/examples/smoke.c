/*
 * Minimal C consumer of the erode FFI. Build from the repository root:
 *
 *   cargo build -p erode-ffi
 *   cc -std=c11 -Wall -Wextra -Icrates/erode-ffi/include \
 *      crates/erode-ffi/examples/smoke.c \
 *      target/debug/liberode_ffi.a -lm -lpthread -ldl -o smoke
 */
#include <assert.h>
#include <math.h>
#include <stdio.h>
#include "erode.h"

int main(void) {
    ErodeModel *model = NULL;
    ErodeStatus status = erode_reference_model("quadratic", &model);
    assert(status == ErodeStatus_Ok);

    ErodeOptimum optimum;
    status = erode_minimize_analytic(model, 350.0, 7000.0, &optimum);
    assert(status == ErodeStatus_Ok);
    assert(fabs(optimum.argmin_w - 5195.4555) < 1e-3);
    assert(optimum.physically_valid);

    double roots[4];
    uintptr_t count = 0;
    status = erode_inverse_solve(model, 10.0, 350.0, 7000.0, roots, 4, &count);
    assert(status == ErodeStatus_Ok);

    erode_model_free(model);

    status = erode_reference_model("nope", &model);
    assert(status == ErodeStatus_InvalidArgument);
    printf("expected failure message: %s\n", erode_last_error_message());
    printf("C smoke test passed: minimum at %.4f W, %.4f s, %llu evaluations\n",
           optimum.argmin_w, optimum.min_s, (unsigned long long)optimum.evaluations);
    return 0;
}
