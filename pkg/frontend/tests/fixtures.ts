/** Schema-exact sample CSVs for the unit tests. */

export const HISTORY_PSM = `# seed=1
method,level,n_ov,n_pre,n_post,coarse,iteration,rel_error,rel_residual
psm,5,2,1,0,none,0,1.0000000000000000e+00,
psm,5,2,1,0,none,1,8.5000000000000000e-01,
psm,5,2,1,0,none,2,7.2000000000000000e-01,
psm,5,2,1,0,none,3,6.1000000000000000e-01,
`;

export const HISTORY_TWO_LEVEL = `# seed=1
method,level,n_ov,n_pre,n_post,coarse,iteration,rel_error,rel_residual
g2s,5,2,1,0,geometric,0,1.0000000000000000e+00,1.0000000000000000e+00
g2s,5,2,1,0,geometric,1,2.0000000000000000e-02,3.0000000000000000e-02
g2s,5,2,1,0,geometric,2,5.0000000000000000e-04,6.0000000000000000e-04
g2s,5,2,1,0,geometric,3,1.0000000000000000e-05,2.0000000000000000e-05
`;

export const RADII = `# seed=1
operator,n_ov,level,rho_numeric,rho_theory,gap
two_level_interface,1,5,7.1796769724490922e-02,7.1796769724490478e-02,6.1853647671641704e-15
two_level_ras,1,5,4.4754546286429808e-01,,
two_level_interface,3,5,5.1547761428715668e-03,5.1547761428715824e-03,3.0287467100547974e-15
two_level_ras,3,5,1.9670423611662324e-02,,
two_level_interface,5,5,3.8654916225916739e-04,3.8654916225917016e-04,7.1522999136248907e-15
two_level_ras,5,5,1.2400040680794573e-02,,
`;
