#include <stdio.h>
#include <string.h>
#include "anticyc.h"

int main(void) {
    char *json = NULL;
    if (ac_crit("{\"n\":1,\"mu\":[0,-5],\"lambda\":[0]}", &json) != AC_STATUS_OK) return 1;
    if (strstr(json, "\"crit\"") == NULL) return 2;
    ac_string_free(json);

    AcModel *model = NULL;
    if (ac_model_load_bundled("n1-p3-two-class", &model) != AC_STATUS_OK) return 3;
    AcEigenform *eigen = NULL;
    if (ac_eigenform_find(model, "{\"n\":1,\"mu\":[2,-2],\"lambda\":[0]}", 0, 8, 6, &eigen) != AC_STATUS_OK) return 4;
    AcLFunction *l = NULL;
    if (ac_lfunction_build(model, eigen, 1, &l) != AC_STATUS_OK) return 5;
    if (ac_lfunction_eval(l, "{\"j\":0,\"beta\":1,\"gen_exponent\":1}", &json) != AC_STATUS_OK) return 6;
    printf("%s\n", json);
    ac_string_free(json);

    if (ac_crit(NULL, &json) != AC_STATUS_NULL_ARGUMENT || ac_last_error() == NULL) return 7;
    ac_lfunction_free(l);
    ac_eigenform_free(eigen);
    ac_model_free(model);
    return 0;
}
