/* The following function is PENCIL-compliant.  */
void foo (int a[restrict const static 5]) {
  /* `a[]' is const but its elements are not.  */
  a[0] = 1;

  /* Here const is not required.  Local variables are
     not coerced to pointers.  */
  int c[2];
}
