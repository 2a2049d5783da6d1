using System;

namespace Shop.Business.Util
{
    internal static class MathUtil
    {
        public static decimal Round(decimal value)
        {
            return Math.Round(value, 2);
        }
    }
}
