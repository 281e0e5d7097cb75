#include <stdio.h>
#include "sqrtnot_noise.h"

int main(void) {
    SqrtnotMatrix *m = NULL;
    SqrtnotStatus st = sqrtnot_matrix_build(0.5, &m);
    if (st != SQRTNOT_STATUS_OK) {
        fprintf(stderr, "build failed: %s\n", sqrtnot_status_message(st));
        return 1;
    }
    double p[4], f, s_dd;
    sqrtnot_output_probabilities(m, SQRTNOT_LEAD_A, p);
    sqrtnot_fidelity(m, SQRTNOT_LEAD_A, &f);
    sqrtnot_shot_noise_auto(m, SQRTNOT_LEAD_D, SQRTNOT_LEAD_A, &s_dd);
    printf("P = %.6f %.6f %.6f %.6f  F = %.6f  S_DD = %.6f\n", p[0], p[1], p[2], p[3], f, s_dd);
    sqrtnot_matrix_free(m);
    return 0;
}
