"""Frozen reference values written by generate.py (mpmath, 80 to 3000 digits)."""

VALUES = {
    'qp_0.3_inf_0.5': complex(0.5101178266339875, 0.0),
    'qp_m2.5_inf_0.5': complex(22.616279940494586, 0.0),
    'qp_0.2_5_0.5': complex(0.65856375, 0.0),
    'bq_0.5': complex(1.6416325606551538, 0.0),
    'eq_0.3_0.5': complex(1.960331413231527, 0.0),
    'Eq_m2.5+0.5i_0.5': complex(0.08899505358374345, -0.06417131264764758),
    'gauss_e_1.7_0.5': complex(0.11914895648230298, 0.0),
    'gauss_E_3.1_0.5': complex(3.8954195152764446, 0.0),
    'strip_1.3_0.5': complex(0.6759225979671435, 0.0),
    'qp_0.3_inf_0.7': complex(0.3310895172403179, 0.0),
    'qp_m2.5_inf_0.7': complex(223.8030675270734, 0.0),
    'qp_0.2_5_0.7': complex(0.550248710963072, 0.0),
    'bq_0.7': complex(1.3165508356492288, 0.0),
    'eq_0.3_0.7': complex(3.0203312032804726, 0.0),
    'Eq_m2.5+0.5i_0.7': complex(-0.008092932851525953, 0.0002666595157743641),
    'gauss_e_1.7_0.7': complex(0.03438140761221718, 0.0),
    'gauss_E_3.1_0.7': complex(1.3478744721483618, 0.0),
    'strip_1.3_0.7': complex(0.6759225979671435, 0.0),
    'cq_1_0.5': complex(1.3804465514652573, 0.0),
    'gauss_cal_k-6_0.5': complex(1.6940337557821964e-28, 0.0),
    'gauss_cal_k-12_0.5': complex(6.136250401185689e-99, 0.0),
    'gm2_k-3_0.5': complex(-9.248692381445214e-05, 0.0),
    'gm0_k0_0.5': complex(-0.1042265967982553, 0.0),
    'mu0_gm1_0.5': complex(1.1330930035647435, 0.0),
    'fourier_gauss_y1_0.5': complex(0.9504892686721546, 0.0),
    'cq_0.5_0.7': complex(1.2042374890408871, 0.0),
    'gauss_cal_k-8_0.7': complex(2.770832603246199e-25, 0.0),
}
