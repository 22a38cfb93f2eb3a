/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_simulation_free: (a: number, b: number) => void;
export const fermi_dirac: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const localization: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const simulation_energies: (a: number) => [number, number];
export const simulation_equilibrated: (a: number) => number;
export const simulation_fd_targets: (a: number) => [number, number];
export const simulation_ground_state_probability: (a: number) => [number, number];
export const simulation_max_occupation: (a: number) => number;
export const simulation_n_sites: (a: number) => number;
export const simulation_new: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number) => [number, number, number];
export const simulation_populations: (a: number) => [number, number];
export const simulation_site_populations: (a: number) => [number, number];
export const simulation_times: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
