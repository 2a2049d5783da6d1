using System;
using Acme.Logging;
using Shop.Business.Models;

namespace Shop.Business.Services
{
    public abstract class BaseService
    {
        protected void Validate(Order order)
        {
            if (order == null)
            {
                Log.Warn("missing order");
                throw new ArgumentNullException("order");
            }
        }
    }
}
